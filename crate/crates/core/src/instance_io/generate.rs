use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::IoError;
use crate::routing::{Location, Metric, ProblemInstance, VariantKind, VariantSpec};

/// Side length of the square generated coordinates are drawn from.
pub const COORD_MAX: f64 = 100.0;

/// Deterministic rules for the parameters the variant definitions leave
/// open. Stored in the dataset manifest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationRules {
    /// k-TSP visits `ceil(n * ktsp_fraction)` locations, clamped to `2..=n`.
    pub ktsp_fraction: f64,
    /// GTSP uses `ceil(n / gtsp_cluster_divisor)` clusters.
    pub gtsp_cluster_divisor: usize,
}

impl Default for GenerationRules {
    fn default() -> Self {
        Self {
            ktsp_fraction: 0.5,
            gtsp_cluster_divisor: 5,
        }
    }
}

impl GenerationRules {
    pub fn ktsp_k(&self, n: usize) -> usize {
        ((n as f64 * self.ktsp_fraction).ceil() as usize).clamp(2, n)
    }

    pub fn gtsp_cluster_count(&self, n: usize) -> usize {
        n.div_ceil(self.gtsp_cluster_divisor.max(1)).clamp(1, n - 1)
    }
}

fn stream_seed(kind: VariantKind, n: usize, seed: u64) -> u64 {
    // splitmix64 over (seed, kind, n) so cells with the same seed differ
    let mut z = seed
        ^ ((kind as u64 + 1) << 56)
        ^ ((n as u64) << 40);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn generate_random_instance(kind: VariantKind, n: usize, seed: u64) -> Result<ProblemInstance, IoError> {
    generate_with_rules(kind, n, seed, &GenerationRules::default())
}

pub fn generate_with_rules(
    kind: VariantKind,
    n: usize,
    seed: u64,
    rules: &GenerationRules,
) -> Result<ProblemInstance, IoError> {
    if kind.is_multi_robot() {
        return Err(IoError::Generation(format!(
            "{} is a multi-robot variant; derive it from a CVRPLIB file instead",
            kind.slug()
        )));
    }
    if n < 3 {
        return Err(IoError::Generation(format!("need at least 3 locations, got {n}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(kind, n, seed));
    let locations: Vec<Location> = (0..n)
        .map(|id| {
            let x = rng.random_range(0.0..=COORD_MAX);
            let y = rng.random_range(0.0..=COORD_MAX);
            Location::new(id, x, y)
        })
        .collect();

    let mut variant = VariantSpec::single(kind, 0);
    match kind {
        VariantKind::Ktsp => variant.k = Some(rules.ktsp_k(n)),
        VariantKind::Gtsp => {
            variant.clusters = Some(angular_clusters(&locations, 0, rules.gtsp_cluster_count(n)))
        }
        _ => {}
    }

    let name = format!("{}-n{}-s{}", kind.slug(), n, seed);
    ProblemInstance::new(name, variant, locations, Metric::ExactEuclidean, Some(seed))
        .map_err(|e| IoError::Generation(e.to_string()))
}

/// Sorts the non-depot ids by polar angle around their centroid and deals
/// them round-robin into `count` clusters.
pub fn angular_clusters(locations: &[Location], depot: usize, count: usize) -> Vec<Vec<usize>> {
    let customers: Vec<&Location> = locations.iter().filter(|l| l.id != depot).collect();
    let cx = customers.iter().map(|l| l.x).sum::<f64>() / customers.len() as f64;
    let cy = customers.iter().map(|l| l.y).sum::<f64>() / customers.len() as f64;
    let mut by_angle: Vec<(f64, usize)> = customers
        .iter()
        .map(|l| ((l.y - cy).atan2(l.x - cx), l.id))
        .collect();
    by_angle.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut clusters = vec![Vec::new(); count];
    for (pos, &(_, id)) in by_angle.iter().enumerate() {
        clusters[pos % count].push(id);
    }
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters
}
