use std::fmt::Write as _;
use std::path::Path;

use base64::Engine as _;
use serde::{Deserialize, Serialize};

use super::{GatewayError, Task};
use crate::corpus::DesignCase;
use crate::retrieval::RetrievalHit;

pub const DEFAULT_STYLE: &str = "concise technical";
pub const DEFAULT_TONE: &str = "neutral";
pub const DEFAULT_AUDIENCE: &str = "design engineer";
pub const MAX_IMAGE_BYTES: usize = 8 * 1024 * 1024;

const SYSTEM_TEXT: &str = "You assess early-stage product concepts. Use the reference projects \
provided as evidence where they are relevant and answer in exactly the requested format.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignBrief {
    pub problem: String,
    pub design_solution: String,
    pub key_functions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensions_and_weight: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_ref: Option<String>,
    /// Follow-up messages appended during an interactive session.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl DesignBrief {
    pub fn from_case(case: &DesignCase) -> Self {
        let ctx = &case.refined_context;
        DesignBrief {
            problem: ctx.problem.clone(),
            design_solution: ctx.design_solution.clone(),
            key_functions: ctx.key_functions.clone(),
            dimensions_and_weight: ctx.dimensions_and_weight.clone(),
            image_ref: case.image_ref.clone(),
            notes: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.problem.trim().is_empty() {
            return Err(GatewayError::InvalidBrief("problem must be non-empty".into()));
        }
        if self.design_solution.trim().is_empty() {
            return Err(GatewayError::InvalidBrief("design_solution must be non-empty".into()));
        }
        if self.key_functions.len() != 3 {
            return Err(GatewayError::InvalidBrief(format!(
                "key_functions must hold exactly 3 entries, found {}",
                self.key_functions.len()
            )));
        }
        if self.key_functions.iter().any(|k| k.trim().is_empty()) {
            return Err(GatewayError::InvalidBrief(
                "key_functions entries must be non-empty".into(),
            ));
        }
        Ok(())
    }

    /// Text used to retrieve evidence for this brief.
    pub fn query_text(&self) -> String {
        let mut parts = vec![self.problem.as_str(), self.design_solution.as_str()];
        parts.extend(self.key_functions.iter().map(String::as_str));
        if let Some(d) = &self.dimensions_and_weight {
            parts.push(d);
        }
        parts.extend(self.notes.iter().map(String::as_str));
        parts.join("\n")
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct ImageAttachment {
    pub media_type: String,
    pub data: Vec<u8>,
}

impl std::fmt::Debug for ImageAttachment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ImageAttachment({}, {} bytes)", self.media_type, self.data.len())
    }
}

impl ImageAttachment {
    /// Accepts PNG, JPEG, GIF and WebP, identified by their magic bytes.
    pub fn from_bytes(data: Vec<u8>) -> Result<Self, GatewayError> {
        if data.len() > MAX_IMAGE_BYTES {
            return Err(GatewayError::Image(format!(
                "{} bytes exceeds the {MAX_IMAGE_BYTES}-byte limit",
                data.len()
            )));
        }
        let media_type =
            sniff_media_type(&data).ok_or_else(|| GatewayError::Image("unrecognised image format".into()))?;
        Ok(ImageAttachment {
            media_type: media_type.into(),
            data,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, GatewayError> {
        let data = std::fs::read(path).map_err(|e| GatewayError::Image(format!("{}: {e}", path.display())))?;
        Self::from_bytes(data)
    }

    /// Resolves an `image_ref`: a `data:<type>;base64,` URL or a file path.
    pub fn from_ref(image_ref: &str) -> Result<Self, GatewayError> {
        if let Some(rest) = image_ref.strip_prefix("data:") {
            let (_, b64) = rest
                .split_once(";base64,")
                .ok_or_else(|| GatewayError::Image("data reference must be base64 encoded".into()))?;
            let data = base64::engine::general_purpose::STANDARD
                .decode(b64.trim())
                .map_err(|e| GatewayError::Image(e.to_string()))?;
            return Self::from_bytes(data);
        }
        Self::from_path(Path::new(image_ref))
    }

    pub fn data_url(&self) -> String {
        format!(
            "data:{};base64,{}",
            self.media_type,
            base64::engine::general_purpose::STANDARD.encode(&self.data)
        )
    }
}

pub(crate) fn sniff_media_type(data: &[u8]) -> Option<&'static str> {
    if data.starts_with(b"\x89PNG\r\n\x1a\n") {
        Some("image/png")
    } else if data.starts_with(&[0xFF, 0xD8, 0xFF]) {
        Some("image/jpeg")
    } else if data.starts_with(b"GIF87a") || data.starts_with(b"GIF89a") {
        Some("image/gif")
    } else if data.len() >= 12 && &data[..4] == b"RIFF" && &data[8..12] == b"WEBP" {
        Some("image/webp")
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceItem {
    pub doc_id: String,
    pub seq: u32,
    pub text: String,
}

impl From<&RetrievalHit> for EvidenceItem {
    fn from(h: &RetrievalHit) -> Self {
        EvidenceItem {
            doc_id: h.chunk.doc_id.clone(),
            seq: h.chunk.seq,
            text: h.chunk.text.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Costar {
    pub context: String,
    pub objective: String,
    pub style: String,
    pub tone: String,
    pub audience: String,
    pub response_format: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub costar: Costar,
    pub evidence: Vec<EvidenceItem>,
    pub image: Option<ImageAttachment>,
    pub task: Task,
    pub expected_unit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub system: String,
    pub user: String,
}

pub fn assemble_costar_prompt(
    brief: &DesignBrief,
    evidence: &[EvidenceItem],
    task: Task,
    expected_unit: Option<&str>,
    image: Option<ImageAttachment>,
) -> Result<PromptBundle, GatewayError> {
    brief.validate()?;
    let unit = expected_unit.map(str::trim).filter(|u| !u.is_empty());
    if task == Task::Performance && unit.is_none() {
        return Err(GatewayError::MissingUnit);
    }
    let unit = if task == Task::Performance { unit } else { None };

    let mut context = String::new();
    let _ = writeln!(context, "Problem: {}", brief.problem.trim());
    let _ = writeln!(context, "Design solution: {}", brief.design_solution.trim());
    context.push_str("Key functions:\n");
    for (i, k) in brief.key_functions.iter().enumerate() {
        let _ = writeln!(context, "{}. {}", i + 1, k.trim());
    }
    if let Some(d) = brief.dimensions_and_weight.as_deref().filter(|d| !d.trim().is_empty()) {
        let _ = writeln!(context, "Dimensions and weight: {}", d.trim());
    }
    if !brief.notes.is_empty() {
        context.push_str("Follow-up notes:\n");
        for n in &brief.notes {
            let _ = writeln!(context, "- {}", n.trim());
        }
    }
    context.push_str(if image.is_some() {
        "Image: a sketch of the concept is attached."
    } else {
        "Image: no sketch or image is attached; rely on the written description."
    });

    let (objective, response_format) = match task {
        Task::Cost => (
            "Predict the total cost in USD of building a working prototype of this design, \
             including all parts and materials."
                .to_string(),
            "One sentence stating a single total cost in USD written with a dollar sign, \
             for example \"$120.00\". Do not give a range."
                .to_string(),
        ),
        Task::Performance => {
            let u = unit.unwrap_or_default();
            (
                format!(
                    "Predict the primary performance figure of a working prototype of this design, \
                     measured in {u}."
                ),
                format!("One sentence stating a single number immediately followed by the unit \"{u}\". Do not give a range."),
            )
        }
        Task::Usability => (
            "Predict how users will judge the usability of this design once built.".to_string(),
            "List three positive aspects and then three potential issues. Start with a line \
             \"Positives:\" followed by three numbered items, then a line \"Issues:\" followed by \
             three numbered items. Keep each item to a few words."
                .to_string(),
        ),
        Task::Refine => (
            "Suggest one modification that would make this design perform better, and estimate \
             the improvement it should bring."
                .to_string(),
            "A short paragraph describing the modification, ending with the expected improvement \
             written as a percentage range such as \"5-8%\"."
                .to_string(),
        ),
    };

    Ok(PromptBundle {
        costar: Costar {
            context,
            objective,
            style: DEFAULT_STYLE.into(),
            tone: DEFAULT_TONE.into(),
            audience: DEFAULT_AUDIENCE.into(),
            response_format,
        },
        evidence: evidence.to_vec(),
        image,
        task,
        expected_unit: unit.map(str::to_owned),
    })
}

impl PromptBundle {
    pub fn render(&self) -> RenderedPrompt {
        let c = &self.costar;
        let mut user = String::new();
        for (head, body) in [
            ("CONTEXT", &c.context),
            ("OBJECTIVE", &c.objective),
            ("STYLE", &c.style),
            ("TONE", &c.tone),
            ("AUDIENCE", &c.audience),
            ("RESPONSE", &c.response_format),
        ] {
            let _ = write!(user, "# {head}\n{}\n\n", body.trim_end());
        }
        user.push_str("# EVIDENCE\n");
        if self.evidence.is_empty() {
            user.push_str("No reference projects were retrieved.\n");
        }
        for (i, e) in self.evidence.iter().enumerate() {
            let _ = write!(
                user,
                "[{}] {} (chunk {})\n{}\n\n",
                i + 1,
                e.doc_id,
                e.seq,
                e.text.trim_end()
            );
        }
        RenderedPrompt {
            system: SYSTEM_TEXT.into(),
            user: user.trim_end().to_string() + "\n",
        }
    }
}
