use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Identity of a random stream: a master seed plus a stream index.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub master_seed: u64,
    pub stream_index: u64,
}

/// A reproducible, splittable random stream.
///
/// Backed by ChaCha20 keyed on `master_seed` with the ChaCha stream word set
/// to `stream_index`, so distinct indices give non-overlapping keystreams and
/// a replicate's draws never depend on which thread ran it.
#[derive(Debug, Clone)]
pub struct RngStream {
    id: StreamId,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        Self {
            id: StreamId {
                master_seed,
                stream_index,
            },
            inner,
        }
    }

    pub fn id(&self) -> StreamId {
        self.id
    }

    pub fn master_seed(&self) -> u64 {
        self.id.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.id.stream_index
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u: f64 = self.inner.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Standard normal draw (Marsaglia polar method; the second variate of
    /// each pair is discarded so the stream position stays simple).
    pub fn standard_normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.inner.random::<f64>() - 1.0;
            let v = 2.0 * self.inner.random::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}
