use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Token bucket shared across threads; `acquire` blocks until a token is free.
#[derive(Debug)]
pub struct TokenBucket {
    capacity: f64,
    per_sec: f64,
    state: Mutex<(f64, Instant)>,
}

impl TokenBucket {
    /// # Panics
    /// If `capacity` is zero or `per_sec` is not positive.
    pub fn new(capacity: u32, per_sec: f64) -> Self {
        assert!(
            capacity > 0 && per_sec > 0.0,
            "token bucket needs capacity and a positive rate"
        );
        TokenBucket {
            capacity: capacity as f64,
            per_sec,
            state: Mutex::new((capacity as f64, Instant::now())),
        }
    }

    pub fn try_acquire(&self) -> Result<(), Duration> {
        let mut st = self.state.lock().unwrap_or_else(|p| p.into_inner());
        let now = Instant::now();
        let refill = now.duration_since(st.1).as_secs_f64() * self.per_sec;
        st.0 = (st.0 + refill).min(self.capacity);
        st.1 = now;
        if st.0 >= 1.0 {
            st.0 -= 1.0;
            Ok(())
        } else {
            Err(Duration::from_secs_f64((1.0 - st.0) / self.per_sec))
        }
    }

    pub fn acquire(&self) {
        while let Err(wait) = self.try_acquire() {
            std::thread::sleep(wait);
        }
    }
}
