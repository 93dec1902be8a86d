//! Reader for the TSPLIB / CVRPLIB text format (EUC_2D only).

use super::IoError;
use crate::routing::{Location, Metric, ProblemInstance, VariantKind, VariantSpec};

/// A parsed file plus the metadata the instance type has no room for.
#[derive(Debug, Clone, PartialEq)]
pub struct TsplibDocument {
    pub instance: ProblemInstance,
    pub comment: Option<String>,
    /// Optimum quoted in the COMMENT line ("Optimal value: 450"), if any.
    pub published_optimum: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Header,
    Coords,
    Demands,
    Depots,
}

fn err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, IoError> {
    tok.parse()
        .map_err(|_| err(line, format!("malformed {what} `{tok}`")))
}

pub fn parse_tsplib(text: &str) -> Result<ProblemInstance, IoError> {
    parse_tsplib_document(text).map(|d| d.instance)
}

pub fn parse_tsplib_document(text: &str) -> Result<TsplibDocument, IoError> {
    let mut name: Option<String> = None;
    let mut comment: Option<String> = None;
    let mut kind: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut capacity: Option<u32> = None;
    let mut weight_type: Option<String> = None;
    let mut coords: Vec<Option<(f64, f64)>> = Vec::new();
    let mut demands: Vec<Option<u32>> = Vec::new();
    let mut depots: Vec<usize> = Vec::new();
    let mut seen_coords = false;
    let mut seen_demands = false;
    let mut seen_depots = false;
    let mut depots_closed = false;
    let mut section = Section::Header;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }

        let upper_head = line
            .split(|c: char| c == ':' || c.is_whitespace())
            .next()
            .unwrap_or("")
            .to_ascii_uppercase();
        match upper_head.as_str() {
            "NODE_COORD_SECTION" => {
                let n = dimension.ok_or_else(|| err(line_no, "NODE_COORD_SECTION before DIMENSION"))?;
                coords = vec![None; n];
                seen_coords = true;
                section = Section::Coords;
                continue;
            }
            "DEMAND_SECTION" => {
                let n = dimension.ok_or_else(|| err(line_no, "DEMAND_SECTION before DIMENSION"))?;
                demands = vec![None; n];
                seen_demands = true;
                section = Section::Demands;
                continue;
            }
            "DEPOT_SECTION" => {
                seen_depots = true;
                section = Section::Depots;
                continue;
            }
            _ => {}
        }

        match section {
            Section::Header => {
                let (key, value) = match line.split_once(':') {
                    Some((k, v)) => (k.trim(), v.trim()),
                    None => match line.split_once(char::is_whitespace) {
                        Some((k, v)) => (k.trim(), v.trim()),
                        None => (line, ""),
                    },
                };
                match key.to_ascii_uppercase().as_str() {
                    "NAME" => name = Some(value.to_string()),
                    "COMMENT" => comment = Some(value.to_string()),
                    "TYPE" => kind = Some(value.to_ascii_uppercase()),
                    "DIMENSION" => dimension = Some(parse_num(value, line_no, "DIMENSION")?),
                    "CAPACITY" => capacity = Some(parse_num(value, line_no, "CAPACITY")?),
                    "EDGE_WEIGHT_TYPE" => {
                        let wt = value.to_ascii_uppercase();
                        if wt != "EUC_2D" {
                            return Err(err(
                                line_no,
                                format!("unsupported EDGE_WEIGHT_TYPE `{value}` (only EUC_2D)"),
                            ));
                        }
                        weight_type = Some(wt);
                    }
                    other => return Err(err(line_no, format!("unknown keyword `{other}`"))),
                }
            }
            Section::Coords => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(err(line_no, "coordinate line needs `id x y`"));
                }
                let id: usize = parse_num(toks[0], line_no, "node id")?;
                let x: f64 = parse_num(toks[1], line_no, "coordinate")?;
                let y: f64 = parse_num(toks[2], line_no, "coordinate")?;
                let slot = id
                    .checked_sub(1)
                    .and_then(|i| coords.get_mut(i))
                    .ok_or_else(|| err(line_no, format!("node id {id} out of range")))?;
                if slot.replace((x, y)).is_some() {
                    return Err(err(line_no, format!("duplicate node id {id}")));
                }
            }
            Section::Demands => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 2 {
                    return Err(err(line_no, "demand line needs `id demand`"));
                }
                let id: usize = parse_num(toks[0], line_no, "node id")?;
                let d: u32 = parse_num(toks[1], line_no, "demand")?;
                let slot = id
                    .checked_sub(1)
                    .and_then(|i| demands.get_mut(i))
                    .ok_or_else(|| err(line_no, format!("node id {id} out of range")))?;
                if slot.replace(d).is_some() {
                    return Err(err(line_no, format!("duplicate demand for node {id}")));
                }
            }
            Section::Depots => {
                for tok in line.split_whitespace() {
                    let v: i64 = parse_num(tok, line_no, "depot id")?;
                    if v == -1 {
                        depots_closed = true;
                    } else if depots_closed {
                        return Err(err(line_no, "depot listed after terminating -1"));
                    } else {
                        let n = dimension.unwrap_or(0) as i64;
                        if v < 1 || v > n {
                            return Err(err(line_no, format!("depot {v} out of range")));
                        }
                        depots.push((v - 1) as usize);
                    }
                }
            }
        }
    }

    let end = last_line;
    let name = name.ok_or_else(|| err(end, "missing NAME"))?;
    let kind = kind.ok_or_else(|| err(end, "missing TYPE"))?;
    let n = dimension.ok_or_else(|| err(end, "missing DIMENSION"))?;
    if weight_type.is_none() {
        return Err(err(end, "missing EDGE_WEIGHT_TYPE"));
    }
    if !seen_coords {
        return Err(err(end, "missing NODE_COORD_SECTION"));
    }
    let coords: Vec<(f64, f64)> = coords
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| err(end, format!("no coordinates for node {}", i + 1))))
        .collect::<Result<_, _>>()?;

    let is_cvrp = match kind.as_str() {
        "CVRP" => true,
        "TSP" => false,
        other => return Err(err(end, format!("unsupported TYPE `{other}`"))),
    };

    let depot = if seen_depots {
        match depots.as_slice() {
            [d] => *d,
            [] => return Err(err(end, "DEPOT_SECTION lists no depot")),
            _ => return Err(err(end, "multiple depots are not supported")),
        }
    } else if is_cvrp {
        return Err(err(end, "missing DEPOT_SECTION"));
    } else {
        0
    };

    let mut locations: Vec<Location> = coords
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Location::new(i, x, y))
        .collect();

    let variant = if is_cvrp {
        if !seen_demands {
            return Err(err(end, "missing DEMAND_SECTION"));
        }
        let capacity = capacity.ok_or_else(|| err(end, "missing CAPACITY"))?;
        for (i, d) in demands.iter().enumerate() {
            let d = d.ok_or_else(|| err(end, format!("no demand for node {}", i + 1)))?;
            locations[i].demand = d;
        }
        if locations[depot].demand != 0 {
            return Err(err(end, "depot demand must be zero"));
        }
        let m = fleet_size_from_name(&name)
            .ok_or_else(|| err(1, format!("cannot read fleet size from name `{name}` (expected `-k<m>`)")))?;
        VariantSpec {
            kind: VariantKind::Cvrp,
            k: None,
            clusters: None,
            num_robots: Some(m),
            capacity: Some(capacity),
            depot_ids: vec![depot],
        }
    } else {
        VariantSpec::single(VariantKind::Tsp, depot)
    };

    let published_optimum = comment.as_deref().and_then(optimum_from_comment);
    let instance = ProblemInstance::new(name, variant, locations, Metric::TsplibRounded, None)
        .map_err(|e| err(end, e.to_string()))?;
    if instance.n() != n {
        return Err(err(end, "DIMENSION does not match node count"));
    }
    Ok(TsplibDocument {
        instance,
        comment,
        published_optimum,
    })
}

/// Reads `m` from a CVRPLIB name such as `P-n16-k8`.
pub fn fleet_size_from_name(name: &str) -> Option<usize> {
    name.split('-')
        .filter_map(|part| part.strip_prefix('k'))
        .filter_map(|digits| digits.parse().ok())
        .last()
}

fn optimum_from_comment(comment: &str) -> Option<f64> {
    let lower = comment.to_ascii_lowercase();
    let idx = lower.find("optimal value")?;
    let rest = &comment[idx + "optimal value".len()..];
    let digits: String = rest
        .trim_start_matches(|c: char| c == ':' || c.is_whitespace())
        .chars()
        .take_while(|c| c.is_ascii_digit() || *c == '.')
        .collect();
    digits.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "NAME : T-n4-k2
COMMENT : (test, Optimal value: 12)
TYPE : CVRP
DIMENSION : 4
EDGE_WEIGHT_TYPE : EUC_2D
CAPACITY : 10
NODE_COORD_SECTION
 1 0 0
 2 3 4
 3 0 1
 4 1 1
DEMAND_SECTION
1 0
2 5
3 5
4 5
DEPOT_SECTION
 1
 -1
EOF
";

    #[test]
    fn parses_small_file() {
        let doc = parse_tsplib_document(SMALL).unwrap();
        let inst = &doc.instance;
        assert_eq!(inst.name, "T-n4-k2");
        assert_eq!(inst.n(), 4);
        assert_eq!(inst.variant.num_robots, Some(2));
        assert_eq!(inst.variant.capacity, Some(10));
        assert_eq!(inst.depot(), 0);
        assert_eq!(inst.locations[1].demand, 5);
        assert_eq!(inst.metric, Metric::TsplibRounded);
        assert_eq!(doc.published_optimum, Some(12.0));
    }

    #[test]
    fn colon_spacing_is_flexible() {
        let text = SMALL.replace("NAME : ", "NAME: ").replace("DIMENSION : 4", "DIMENSION:4");
        assert_eq!(parse_tsplib(&text).unwrap().n(), 4);
    }

    #[test]
    fn missing_demand_section() {
        let cut = SMALL.find("DEMAND_SECTION").unwrap();
        let dep = SMALL.find("DEPOT_SECTION").unwrap();
        let text = format!("{}{}", &SMALL[..cut], &SMALL[dep..]);
        let e = parse_tsplib(&text).unwrap_err();
        assert!(e.to_string().contains("DEMAND_SECTION"), "{e}");
    }

    #[test]
    fn rejects_other_weight_types() {
        let text = SMALL.replace("EUC_2D", "GEO");
        match parse_tsplib(&text) {
            Err(IoError::Parse { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("GEO"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_number_reports_line() {
        let text = SMALL.replace(" 3 0 1", " 3 0 x1");
        match parse_tsplib(&text) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 10),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fleet_size() {
        assert_eq!(fleet_size_from_name("P-n16-k8"), Some(8));
        assert_eq!(fleet_size_from_name("E-n22-k4"), Some(4));
        assert_eq!(fleet_size_from_name("berlin52"), None);
    }
}
