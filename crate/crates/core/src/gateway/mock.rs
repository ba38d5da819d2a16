use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{CallMeta, Completion, CompletionBackend, CompletionParams, GatewayError, PromptBundle, Task};
use crate::seed;

pub const MOCK_PROFILE_SCHEMA: &str = "protopredict/mock-profile-v1";
const NOISE_FLOOR: f64 = -0.9;

fn default_schema() -> String {
    MOCK_PROFILE_SCHEMA.into()
}

fn default_backend_id() -> String {
    "mock".into()
}

fn default_fidelity() -> f64 {
    1.0
}

/// Value drawn as `target * (1 + e)`, `e ~ Normal(0, noise_sd)` truncated below at -0.9.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericTarget {
    pub target: f64,
    pub noise_sd: f64,
}

impl NumericTarget {
    pub fn draw(&self, rng: &mut impl Rng) -> f64 {
        if self.noise_sd == 0.0 {
            return self.target;
        }
        let normal = Normal::new(0.0, self.noise_sd).expect("validated noise_sd");
        let eps = (0..64)
            .map(|_| normal.sample(rng))
            .find(|e| *e >= NOISE_FLOOR)
            .unwrap_or(NOISE_FLOOR);
        self.target * (1.0 + eps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UsabilityProfile {
    pub pool: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub distractors: Vec<String>,
    /// Probability that an item is drawn from `pool` rather than `distractors`.
    #[serde(default = "default_fidelity")]
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefineProfile {
    pub responses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockProfile {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default = "default_backend_id")]
    pub backend_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<NumericTarget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub performance: Option<NumericTarget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usability: Option<UsabilityProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<RefineProfile>,
}

impl Default for MockProfile {
    fn default() -> Self {
        MockProfile {
            schema: default_schema(),
            backend_id: default_backend_id(),
            cost: None,
            performance: None,
            usability: None,
            refine: None,
        }
    }
}

impl MockProfile {
    pub fn from_json(text: &str) -> Result<Self, GatewayError> {
        let p: MockProfile = serde_json::from_str(text).map_err(|e| GatewayError::Profile(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        let bad = |m: String| Err(GatewayError::Profile(m));
        if self.schema != MOCK_PROFILE_SCHEMA {
            return bad(format!(
                "unsupported schema {:?}, expected {MOCK_PROFILE_SCHEMA:?}",
                self.schema
            ));
        }
        for (name, t) in [("cost", &self.cost), ("performance", &self.performance)] {
            if let Some(t) = t {
                if !(t.target.is_finite() && t.target >= 0.0) {
                    return bad(format!("{name}.target must be finite and >= 0"));
                }
                if !(t.noise_sd.is_finite() && t.noise_sd >= 0.0) {
                    return bad(format!("{name}.noise_sd must be finite and >= 0"));
                }
            }
        }
        if let Some(u) = &self.usability {
            if u.pool.is_empty() {
                return bad("usability.pool must be non-empty".into());
            }
            if !(0.0..=1.0).contains(&u.fidelity) {
                return bad("usability.fidelity must lie in [0, 1]".into());
            }
        }
        if let Some(r) = &self.refine {
            if r.responses.is_empty() {
                return bad("refine.responses must be non-empty".into());
            }
        }
        Ok(())
    }
}

/// Deterministic offline completion for `bundle.task`.
pub fn mock_complete(bundle: &PromptBundle, seed: u64, profile: &MockProfile) -> Result<String, GatewayError> {
    let mut rng = seed::rng(seed::derive_seed(seed, &[seed::label(bundle.task.as_str())]));
    match bundle.task {
        Task::Cost => {
            let t = profile.cost.as_ref().ok_or(GatewayError::ProfileMissing(Task::Cost))?;
            let v = t.draw(&mut rng);
            Ok(format!("Estimated total prototype cost: {}.", format_usd(v)))
        }
        Task::Performance => {
            let t = profile
                .performance
                .as_ref()
                .ok_or(GatewayError::ProfileMissing(Task::Performance))?;
            let unit = bundle.expected_unit.as_deref().ok_or(GatewayError::MissingUnit)?;
            let v = t.draw(&mut rng);
            Ok(format!("Expected performance of the prototype: {v:.2} {unit}."))
        }
        Task::Usability => {
            let u = profile
                .usability
                .as_ref()
                .ok_or(GatewayError::ProfileMissing(Task::Usability))?;
            let items = draw_items(u, 6, &mut rng);
            let mut out = String::from("Positives:\n");
            for (i, it) in items[..3].iter().enumerate() {
                out.push_str(&format!("{}. {}\n", i + 1, it));
            }
            out.push_str("Issues:\n");
            for (i, it) in items[3..].iter().enumerate() {
                out.push_str(&format!("{}. {}\n", i + 1, it));
            }
            Ok(out)
        }
        Task::Refine => {
            let r = profile
                .refine
                .as_ref()
                .ok_or(GatewayError::ProfileMissing(Task::Refine))?;
            Ok(r.responses[rng.random_range(0..r.responses.len())].clone())
        }
    }
}

/// `n` items drawn without replacement from each source, refilling a source once it
/// runs dry.
pub fn draw_items(u: &UsabilityProfile, n: usize, rng: &mut impl Rng) -> Vec<String> {
    let mut pool: Vec<&String> = Vec::new();
    let mut distract: Vec<&String> = Vec::new();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let from_pool = u.distractors.is_empty() || u.fidelity >= 1.0 || rng.random::<f64>() < u.fidelity;
        let (bag, src) = if from_pool {
            (&mut pool, &u.pool)
        } else {
            (&mut distract, &u.distractors)
        };
        if bag.is_empty() {
            bag.extend(src.iter());
            bag.shuffle(rng);
        }
        out.push(bag.pop().expect("non-empty source").clone());
    }
    out
}

/// `$` amount with thousands separators and cents.
pub(crate) fn format_usd(v: f64) -> String {
    let cents = (v * 100.0).round() as i64;
    let (whole, frac) = (cents / 100, cents % 100);
    let digits = whole.to_string();
    let mut grouped = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    format!("${grouped}.{frac:02}")
}

#[derive(Debug, Clone)]
pub struct MockBackend {
    profile: MockProfile,
}

impl MockBackend {
    pub fn new(profile: MockProfile) -> Self {
        MockBackend { profile }
    }

    pub fn profile(&self) -> &MockProfile {
        &self.profile
    }
}

impl CompletionBackend for MockBackend {
    fn id(&self) -> String {
        self.profile.backend_id.clone()
    }

    fn complete(&self, bundle: &PromptBundle, params: &CompletionParams) -> Result<Completion, GatewayError> {
        let seed = params.seed.unwrap_or(0);
        let text = mock_complete(bundle, seed, &self.profile)?;
        Ok(Completion {
            text,
            meta: CallMeta {
                backend: self.id(),
                latency_ms: 0,
                seed: params.seed,
            },
        })
    }
}
