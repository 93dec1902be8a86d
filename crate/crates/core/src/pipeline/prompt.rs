//! Prompt construction, context assets and code extraction.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ContextKind, ContextSpec, PipelineError};
use crate::llm::ChatMessage;
use crate::routing::{Metric, ProblemInstance, Solution, VariantKind};
use crate::sandbox::{ExecStatus, ExecutionResult};

/// Longest program output quoted back to the model.
pub const FEEDBACK_TAIL_CHARS: usize = 4000;

const SYSTEM_PROMPT: &str = "You are an expert in robot routing and combinatorial optimization. \
You answer with complete, runnable Python 3 programs.";

/// Text assets keyed by their path relative to the assets root, for
/// example `formulations/tsp.txt`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assets {
    files: BTreeMap<String, String>,
}

impl Assets {
    /// Loads every `.txt` and `.md` file below `root`.
    pub fn load(root: &Path) -> Result<Self, PipelineError> {
        let mut assets = Assets::default();
        let mut stack = vec![root.to_path_buf()];
        while let Some(dir) = stack.pop() {
            let entries = fs::read_dir(&dir).map_err(|e| PipelineError::io(&dir, e))?;
            for entry in entries {
                let path = entry.map_err(|e| PipelineError::io(&dir, e))?.path();
                if path.is_dir() {
                    stack.push(path);
                    continue;
                }
                let ext = path.extension().and_then(|e| e.to_str());
                if !matches!(ext, Some("txt" | "md")) {
                    continue;
                }
                let text = fs::read_to_string(&path).map_err(|e| PipelineError::io(&path, e))?;
                let rel = path.strip_prefix(root).unwrap_or(&path);
                let key = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
                assets.files.insert(key, text);
            }
        }
        Ok(assets)
    }

    pub fn insert(&mut self, key: impl Into<String>, text: impl Into<String>) {
        self.files.insert(key.into(), text.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.files.get(key).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// Asset key for a context, or `None` for [`ContextKind::None`].
    pub fn key_for(kind: VariantKind, context: &ContextSpec) -> Option<String> {
        let slug = kind.slug();
        let id = context.asset_id.unwrap_or(1);
        match context.kind {
            ContextKind::None => None,
            ContextKind::MathFormulation => Some(format!("formulations/{slug}.txt")),
            ContextKind::PseudoCode => Some(format!("pseudo_code/{slug}/{id}.txt")),
            ContextKind::PaperSummary => Some(format!("paper_summaries/{slug}/{id}.txt")),
        }
    }

    fn context_text(&self, kind: VariantKind, context: &ContextSpec) -> Result<Option<&str>, PipelineError> {
        context.validate()?;
        let Some(key) = Self::key_for(kind, context) else {
            return Ok(None);
        };
        match self.get(&key) {
            Some(t) if !t.trim().is_empty() => Ok(Some(t)),
            _ => Err(PipelineError::Config(format!("missing context asset {key}"))),
        }
    }
}

/// Provenance of one asset slot, as listed in `assets/index.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssetProvenance {
    pub key: String,
    pub source: Option<String>,
    pub note: Option<String>,
}

fn task_statement(instance: &ProblemInstance) -> String {
    let v = &instance.variant;
    let depot = instance.depot();
    match v.kind {
        VariantKind::Tsp => format!(
            "A robot starts at depot location {depot} and must visit every other location exactly once, \
             then come back to the depot. Find such a tour whose total travel distance is as small as possible."
        ),
        VariantKind::Btsp => format!(
            "A robot starts at depot location {depot} and must visit every other location exactly once, \
             then come back to the depot. Find such a tour in which the longest single move between two \
             consecutive stops (including the move back to the depot) is as short as possible."
        ),
        VariantKind::Ktsp => format!(
            "A robot starts at depot location {depot} and must come back to it after visiting exactly {k} \
             distinct locations, where the depot counts as one of the {k}. The other locations may be skipped. \
             Choose the locations and their order so that the total travel distance is as small as possible.",
            k = v.k.unwrap_or(0)
        ),
        VariantKind::Gtsp => format!(
            "The locations other than depot {depot} are divided into groups. A robot starts at the depot, \
             must visit exactly one location from every group (and no other locations), then come back to the \
             depot. Choose one location per group and an order so that the total travel distance is as small \
             as possible."
        ),
        VariantKind::Mtsp => format!(
            "{m} robots all start at depot location {depot}. Every other location must be visited by exactly \
             one robot, each robot must visit at least one location, and every robot returns to the depot. \
             Minimize the sum of the distances traveled by all robots.",
            m = v.route_count()
        ),
        VariantKind::MinmaxMtsp => format!(
            "{m} robots all start at depot location {depot}. Every other location must be visited by exactly \
             one robot, each robot must visit at least one location, and every robot returns to the depot. \
             Minimize the distance traveled by the robot that travels the farthest.",
            m = v.route_count()
        ),
        VariantKind::MdMtsp => format!(
            "{m} robots are stationed at {d} depots. Each robot leaves its own depot and returns to that same \
             depot. Every location that is not a depot must be visited by exactly one robot, and each robot \
             must visit at least one location. Minimize the sum of the distances traveled by all robots.",
            m = v.route_count(),
            d = v.depot_ids.len()
        ),
        VariantKind::Cvrp => format!(
            "A fleet of {m} robots is based at depot location {depot}. Each other location is a customer \
             with a demand. Every customer must be served by exactly one robot, each robot leaves the depot and \
             returns to it, and the demands served on one robot's tour may not add up to more than the robot \
             capacity of {q}. A robot may stay idle. Minimize the sum of the distances traveled by all robots.",
            m = v.route_count(),
            q = v.capacity.unwrap_or(0)
        ),
    }
}

fn instance_data(instance: &ProblemInstance) -> String {
    let v = &instance.variant;
    let mut s = String::new();
    let with_demand = v.kind == VariantKind::Cvrp;
    if with_demand {
        s.push_str("Locations (id: x, y, demand):\n");
    } else {
        s.push_str("Locations (id: x, y):\n");
    }
    for loc in &instance.locations {
        if with_demand {
            let _ = writeln!(s, "{}: {}, {}, {}", loc.id, loc.x, loc.y, loc.demand);
        } else {
            let _ = writeln!(s, "{}: {}, {}", loc.id, loc.x, loc.y);
        }
    }
    match instance.metric {
        Metric::ExactEuclidean => {
            s.push_str("The distance between two locations is the Euclidean distance between their coordinates.\n")
        }
        Metric::TsplibRounded => s.push_str(
            "The distance between two locations is the Euclidean distance between their coordinates, \
             rounded to the nearest integer.\n",
        ),
    }
    if let Some(groups) = &v.clusters {
        s.push_str("Groups:\n");
        for (i, g) in groups.iter().enumerate() {
            let ids: Vec<String> = g.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "group {}: {}", i + 1, ids.join(", "));
        }
    }
    if v.kind == VariantKind::MdMtsp {
        s.push_str("Robot depots:\n");
        for r in 0..v.route_count() {
            let _ = writeln!(s, "robot {}: depot {}", r + 1, v.depot_of_robot(r));
        }
    }
    s
}

fn output_instruction(instance: &ProblemInstance) -> String {
    let v = &instance.variant;
    let routes = if v.kind.is_multi_robot() {
        let m = v.route_count();
        let depots = if v.kind == VariantKind::MdMtsp {
            "robot i's depot as listed above".to_string()
        } else {
            format!("depot {}", instance.depot())
        };
        let idle = if v.kind == VariantKind::Cvrp {
            format!(" An idle robot is written as [{d}, {d}].", d = instance.depot())
        } else {
            String::new()
        };
        format!(
            "\"routes\" must hold exactly {m} lists, the i-th list being robot i's tour, \
             starting and ending at {depots}.{idle}"
        )
    } else {
        format!(
            "\"routes\" must hold exactly one list: the tour, starting and ending at depot {}.",
            instance.depot()
        )
    };
    format!(
        "Write a self-contained Python 3 program that solves this instance. Put the instance data directly \
         in the program; it must not read any files or take input. When it finishes, the program must print \
         the solution as one JSON object on the last line of its output, of the form \
         {{\"routes\": [[0, 3, 1, 0], ...]}}, where every list gives location ids in visiting order. {routes} \
         Reply with the whole program in a single ```python code block."
    )
}

fn context_block(kind: ContextKind, text: &str) -> String {
    let what = match kind {
        ContextKind::None => unreachable!("no block without context"),
        ContextKind::MathFormulation => "A mathematical formulation of a related problem",
        ContextKind::PseudoCode => "Pseudo-code of an algorithm for a related problem",
        ContextKind::PaperSummary => "A summary of a research paper on a related problem",
    };
    format!("{what} is given below as reference.\n-----\n{}\n-----", text.trim_end())
}

/// Natural-language task with the instance data embedded.
pub fn task_description(instance: &ProblemInstance) -> String {
    format!("{}\n\n{}", task_statement(instance), instance_data(instance))
}

/// System prompt plus one user message: task, data, optional context
/// block, output instructions.
pub fn build_prompt(
    instance: &ProblemInstance,
    context: &ContextSpec,
    assets: &Assets,
) -> Result<Vec<ChatMessage>, PipelineError> {
    let mut user = task_description(instance);
    if let Some(text) = assets.context_text(instance.kind(), context)? {
        user.push('\n');
        user.push_str(&context_block(context.kind, text));
        user.push('\n');
    }
    user.push('\n');
    user.push_str(&output_instruction(instance));
    Ok(vec![ChatMessage::system(SYSTEM_PROMPT), ChatMessage::user(user)])
}

/// Body of the first ```python fence, else of the first bare fence.
pub fn extract_code(response: &str) -> Option<String> {
    let mut fallback = None;
    let mut lines = response.lines();
    while let Some(line) = lines.next() {
        let t = line.trim_start();
        let Some(lang) = t.strip_prefix("```") else {
            continue;
        };
        let lang = lang.trim().to_ascii_lowercase();
        let mut body = String::new();
        for l in lines.by_ref() {
            if l.trim_start().starts_with("```") {
                break;
            }
            body.push_str(l);
            body.push('\n');
        }
        if body.trim().is_empty() {
            continue;
        }
        if lang == "python" || lang == "py" || lang == "python3" {
            return Some(body);
        }
        if lang.is_empty() && fallback.is_none() {
            fallback = Some(body);
        }
    }
    fallback
}

fn tail(text: &str, max: usize) -> &str {
    if text.chars().count() <= max {
        return text;
    }
    let skip = text.chars().count() - max;
    let start = text.char_indices().nth(skip).map_or(0, |(i, _)| i);
    &text[start..]
}

fn quoted(label: &str, text: &str) -> String {
    if text.trim().is_empty() {
        format!("{label}: (empty)\n")
    } else {
        format!("{label}:\n{}\n", tail(text, FEEDBACK_TAIL_CHARS).trim_end())
    }
}

/// Follow-up message after a failed run or an unreadable answer.
pub fn debug_feedback(execution: Option<&ExecutionResult>, parse_error: Option<&str>) -> String {
    let Some(exec) = execution else {
        return "Your reply did not contain a Python code block. Reply with the complete program in a single \
                ```python code block."
            .to_string();
    };
    let mut s = match exec.status {
        ExecStatus::Ok => format!(
            "The program ran, but its output could not be read as a solution ({}).\n",
            parse_error.unwrap_or("unknown format")
        ),
        ExecStatus::NonzeroExit => match exec.exit_code {
            Some(c) => format!("Running the program failed with exit status {c}.\n"),
            None => "Running the program failed: it was killed by a signal.\n".to_string(),
        },
        ExecStatus::Timeout => "Running the program failed: it did not finish within the time limit.\n".to_string(),
        ExecStatus::LaunchFailure => "The program could not be started.\n".to_string(),
    };
    if exec.status != ExecStatus::Ok {
        s.push_str(&quoted("Error output", &exec.stderr));
    }
    s.push_str(&quoted("Standard output", &exec.stdout));
    s.push_str("Fix the program and reply with the complete corrected program in a single ```python code block.");
    s
}

/// First verification call: list the task's constraints.
pub fn constraint_prompt(instance: &ProblemInstance) -> Vec<ChatMessage> {
    vec![
        ChatMessage::system(SYSTEM_PROMPT),
        ChatMessage::user(format!(
            "{}\nList every constraint that a correct solution of this task has to satisfy, one per line. \
             Do not solve the task.",
            task_description(instance)
        )),
    ]
}

/// Second verification call: a test program for the printed result.
pub fn unit_test_prompt(instance: &ProblemInstance, constraints: &str, solution: &Solution) -> Vec<ChatMessage> {
    let mut msgs = constraint_prompt(instance);
    msgs.push(ChatMessage::assistant(constraints));
    msgs.push(ChatMessage::user(format!(
        "A program for this task printed the result {}.\nWrite a Python 3 unit test that checks this result \
         against every constraint you listed. When the test runs, a variable SOLUTION already holds the result \
         as a dict whose \"routes\" entry is the list of routes. The test must raise an error (for example with \
         assert) if any constraint is violated and finish normally otherwise. Reply with the test in a single \
         ```python code block.",
        solution_json(solution)
    )));
    msgs
}

/// Follow-up message when the model's own unit test rejected the result.
pub fn verification_feedback(test: Option<&ExecutionResult>) -> String {
    let mut s = String::from("The program ran, but its result did not pass the unit test written for this task.\n");
    if let Some(t) = test {
        s.push_str(&quoted("Test error output", &t.stderr));
        if !t.stdout.trim().is_empty() {
            s.push_str(&quoted("Test standard output", &t.stdout));
        }
    } else {
        s.push_str("No runnable unit test was produced.\n");
    }
    s.push_str("Fix the program and reply with the complete corrected program in a single ```python code block.");
    s
}

pub fn solution_json(solution: &Solution) -> String {
    let routes: Vec<&Vec<usize>> = solution.routes.iter().map(|r| &r.visits).collect();
    serde_json::json!({ "routes": routes }).to_string()
}

/// Test program with the candidate solution bound to `SOLUTION`.
pub fn unit_test_program(test_source: &str, solution: &Solution) -> String {
    format!(
        "import json\nSOLUTION = json.loads('{}')\n\n{}",
        solution_json(solution),
        test_source
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_io::generate_random_instance;
    use crate::llm::Role;

    fn tsp() -> ProblemInstance {
        generate_random_instance(VariantKind::Tsp, 10, 3).unwrap()
    }

    fn math() -> ContextSpec {
        ContextSpec {
            kind: ContextKind::MathFormulation,
            asset_id: None,
        }
    }

    #[test]
    fn baseline_prompt_embeds_all_coordinates() {
        let inst = tsp();
        let msgs = build_prompt(&inst, &ContextSpec::none(), &Assets::default()).unwrap();
        assert_eq!(msgs.len(), 2);
        assert_eq!(msgs[0].role, Role::System);
        let user = &msgs[1].content;
        for loc in &inst.locations {
            assert!(user.contains(&format!("{}: {}, {}\n", loc.id, loc.x, loc.y)));
        }
        assert!(user.contains("{\"routes\""));
        assert!(!user.contains("-----"));
    }

    #[test]
    fn context_block_is_verbatim() {
        let inst = tsp();
        let mut assets = Assets::default();
        assets.insert("formulations/tsp.txt", "min sum c_ij x_ij\ns.t. ...");
        let base = build_prompt(&inst, &ContextSpec::none(), &assets).unwrap();
        let with = build_prompt(&inst, &math(), &assets).unwrap();
        assert!(with[1].content.contains("-----\nmin sum c_ij x_ij\ns.t. ...\n-----"));
        assert!(with[1].content.starts_with(&base[1].content[..base[1].content.find("Write a").unwrap()]));
        assert_eq!(with, build_prompt(&inst, &math(), &assets).unwrap());
    }

    #[test]
    fn missing_asset_is_config_error() {
        let err = build_prompt(&tsp(), &math(), &Assets::default()).unwrap_err();
        assert!(matches!(err, PipelineError::Config(m) if m.contains("formulations/tsp.txt")));
        let no_id = ContextSpec {
            kind: ContextKind::PseudoCode,
            asset_id: None,
        };
        assert!(build_prompt(&tsp(), &no_id, &Assets::default()).is_err());
    }

    #[test]
    fn multi_robot_instructions() {
        let base = crate::instance_io::parse_tsplib(include_str!("../../../../data/cvrplib/P-n19-k2.vrp")).unwrap();
        let inst = crate::instance_io::derive_variant_instance(&base, VariantKind::MdMtsp).unwrap();
        let msgs = build_prompt(&inst, &ContextSpec::none(), &Assets::default()).unwrap();
        let m = inst.variant.route_count();
        assert!(msgs[1].content.contains(&format!("exactly {m} lists")));
        assert!(msgs[1].content.contains("robot 1: depot"));
    }

    #[test]
    fn code_extraction() {
        let r = "Here:\n```\nbare\n```\n```python\nprint(1)\n```\n```python\nprint(2)\n```";
        assert_eq!(extract_code(r).as_deref(), Some("print(1)\n"));
        assert_eq!(extract_code("```\nx = 1\n```").as_deref(), Some("x = 1\n"));
        assert_eq!(extract_code("no code here"), None);
        assert_eq!(extract_code("```python\n```"), None);
    }

    #[test]
    fn feedback_quotes_tail_only() {
        let exec = ExecutionResult {
            status: ExecStatus::NonzeroExit,
            stdout: String::new(),
            stderr: format!("{}END", "x".repeat(10_000)),
            wall_time: 0.1,
            exit_code: Some(1),
            artifacts: None,
        };
        let f = debug_feedback(Some(&exec), None);
        assert!(f.contains("exit status 1"));
        assert!(f.contains("END"));
        assert!(f.len() < 5000);
    }

    #[test]
    fn test_program_prelude() {
        let s = Solution::single(vec![0, 2, 1, 0]);
        let p = unit_test_program("assert SOLUTION['routes'][0][0] == 0\n", &s);
        assert!(p.starts_with("import json\nSOLUTION = json.loads('{\"routes\":[[0,2,1,0]]}')\n"));
    }
}
