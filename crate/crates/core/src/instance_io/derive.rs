use super::IoError;
use crate::routing::{build_distance_matrix, ProblemInstance, VariantKind};

/// Builds one of the multi-robot variants from a parsed CVRP instance.
///
/// m-TSP and MinMax m-TSP drop capacity and demands. MD m-TSP promotes the
/// customer farthest from the depot (smallest id on ties) to a second depot
/// when the fleet has at least two robots. CVRP is the identity.
pub fn derive_variant_instance(base: &ProblemInstance, target: VariantKind) -> Result<ProblemInstance, IoError> {
    if base.kind() != VariantKind::Cvrp {
        return Err(IoError::Derivation(format!(
            "base instance `{}` is {}, expected CVRP",
            base.name,
            base.kind().slug()
        )));
    }
    if !target.is_multi_robot() {
        return Err(IoError::Derivation(format!(
            "{} is not a multi-robot variant",
            target.slug()
        )));
    }
    if target == VariantKind::Cvrp {
        return Ok(base.clone());
    }

    let mut out = base.clone();
    out.name = format!("{}-{}", base.name, target.slug());
    out.variant.kind = target;
    out.variant.capacity = None;
    for loc in &mut out.locations {
        loc.demand = 0;
    }

    if target == VariantKind::MdMtsp {
        let m = base.variant.num_robots.unwrap_or(1);
        let depot = base.depot();
        if m.min(2) == 2 {
            let dm = build_distance_matrix(base);
            let mut far = None;
            let mut far_d = f64::NEG_INFINITY;
            for c in base.customers() {
                if dm.get(depot, c) > far_d {
                    far_d = dm.get(depot, c);
                    far = Some(c);
                }
            }
            if let Some(c) = far {
                out.variant.depot_ids = vec![depot, c];
            }
        }
    }

    out.validate()
        .map_err(|e| IoError::Derivation(e.to_string()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_io::generate_random_instance;
    use crate::routing::{Location, Metric, VariantSpec};

    fn tiny_cvrp(m: usize) -> ProblemInstance {
        let mut locs = vec![
            Location::new(0, 0.0, 0.0),
            Location::new(1, 3.0, 0.0),
            Location::new(2, 0.0, 9.0),
            Location::new(3, 5.0, 5.0),
        ];
        for l in &mut locs[1..] {
            l.demand = 2;
        }
        let spec = VariantSpec {
            kind: VariantKind::Cvrp,
            k: None,
            clusters: None,
            num_robots: Some(m),
            capacity: Some(4),
            depot_ids: vec![0],
        };
        ProblemInstance::new("T-n4-k2", spec, locs, Metric::TsplibRounded, None).unwrap()
    }

    #[test]
    fn mtsp_drops_capacity() {
        let d = derive_variant_instance(&tiny_cvrp(2), VariantKind::Mtsp).unwrap();
        assert_eq!(d.variant.capacity, None);
        assert_eq!(d.variant.num_robots, Some(2));
        assert!(d.locations.iter().all(|l| l.demand == 0));
        assert_eq!(d.name, "T-n4-k2-mtsp");
    }

    #[test]
    fn cvrp_identity() {
        let base = tiny_cvrp(2);
        assert_eq!(derive_variant_instance(&base, VariantKind::Cvrp).unwrap(), base);
    }

    #[test]
    fn md_promotes_farthest() {
        let d = derive_variant_instance(&tiny_cvrp(2), VariantKind::MdMtsp).unwrap();
        assert_eq!(d.variant.depot_ids, vec![0, 2]);
        assert_eq!(d.customers(), vec![1, 3]);
        let single = derive_variant_instance(&tiny_cvrp(1), VariantKind::MdMtsp).unwrap();
        assert_eq!(single.variant.depot_ids, vec![0]);
    }

    #[test]
    fn rejects_non_cvrp_base() {
        let tsp = generate_random_instance(VariantKind::Tsp, 5, 0).unwrap();
        assert!(matches!(
            derive_variant_instance(&tsp, VariantKind::Mtsp),
            Err(IoError::Derivation(_))
        ));
        assert!(derive_variant_instance(&tiny_cvrp(2), VariantKind::Tsp).is_err());
    }
}
