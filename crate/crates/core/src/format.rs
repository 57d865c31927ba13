//! Line-oriented instance format and its JSON mirror.
//!
//! ```text
//! # comment
//! voters: 4            # optional; declares voters named 0..3
//! casting: 2 3
//! 0: 1 2               # list order is rank order
//! 1: 3
//! ```
//!
//! Voter ids follow declaration order: the voters named on `casting:` lines
//! and at the head of delegation lines, in file order, then names that only
//! occur as targets (these are abstainers). With a `voters:` header the
//! names are exactly `0..n-1` and ids equal the numbers.

use std::collections::HashMap;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

enum Decl {
    Casting(Vec<String>),
    Voter(String, Vec<String>),
}

struct Raw {
    voters: Option<usize>,
    decls: Vec<(usize, Decl)>,
}

/// Parses the text format.
pub fn parse_v1(text: &str) -> Result<Instance> {
    let mut raw = Raw { voters: None, decls: Vec::new() };
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (head, rest) = content.split_once(':').ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("expected `<name>: ...`, got `{content}`"),
        })?;
        let head = head.trim();
        let tokens: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        if let Some(bad) = tokens.iter().find(|t| t.contains(':')) {
            return Err(Error::Parse { line: lineno, msg: format!("unexpected `:` in `{bad}`") });
        }
        match head {
            "voters" => {
                if raw.voters.is_some() {
                    return Err(Error::Parse { line: lineno, msg: "duplicate voters header".into() });
                }
                let [count] = tokens.as_slice() else {
                    return Err(Error::Parse { line: lineno, msg: "voters: expects one number".into() });
                };
                let n = count.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("invalid voter count `{count}`"),
                })?;
                raw.voters = Some(n);
            }
            "casting" => raw.decls.push((lineno, Decl::Casting(tokens))),
            "" => return Err(Error::Parse { line: lineno, msg: "missing voter name".into() }),
            name if name.contains(char::is_whitespace) => {
                return Err(Error::Parse { line: lineno, msg: format!("invalid voter name `{name}`") })
            }
            name => raw.decls.push((lineno, Decl::Voter(name.to_string(), tokens))),
        }
    }
    build(raw)
}

fn build(raw: Raw) -> Result<Instance> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let numbered = raw.voters.is_some();
    if let Some(n) = raw.voters {
        for i in 0..n {
            index.insert(i.to_string(), i);
            names.push(i.to_string());
        }
    }
    let mut register = |name: &str, line: usize, names: &mut Vec<String>| -> Result<usize> {
        if let Some(&i) = index.get(name) {
            return Ok(i);
        }
        if numbered {
            return Err(Error::Parse {
                line,
                msg: format!("voter `{name}` is not in 0..{}", names.len()),
            });
        }
        index.insert(name.to_string(), names.len());
        names.push(name.to_string());
        Ok(names.len() - 1)
    };

    let mut casting = Vec::new();
    let mut subject_line: HashMap<usize, usize> = HashMap::new();
    for (line, decl) in &raw.decls {
        match decl {
            Decl::Casting(list) => {
                for name in list {
                    let id = register(name, *line, &mut names)?;
                    if subject_line.insert(id, *line).is_some() {
                        return Err(Error::Parse { line: *line, msg: format!("voter `{name}` declared twice") });
                    }
                    casting.push(id);
                }
            }
            Decl::Voter(name, _) => {
                let id = register(name, *line, &mut names)?;
                if subject_line.insert(id, *line).is_some() {
                    return Err(Error::Parse { line: *line, msg: format!("voter `{name}` declared twice") });
                }
            }
        }
    }
    let mut rankings: Vec<Vec<usize>> = Vec::new();
    let mut owners: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for (line, decl) in &raw.decls {
        if let Decl::Voter(name, targets) = decl {
            let id = register(name, *line, &mut names)?;
            let mut ids = Vec::with_capacity(targets.len());
            for t in targets {
                let tid = register(t, *line, &mut names)?;
                if tid == id {
                    return Err(Error::Parse { line: *line, msg: format!("`{name}` delegates to itself") });
                }
                if ids.contains(&tid) {
                    return Err(Error::Parse { line: *line, msg: format!("`{name}` lists `{t}` twice") });
                }
                ids.push(tid);
            }
            owners.push((*line, id, ids));
        }
    }
    rankings.resize(names.len(), Vec::new());
    let is_casting: Vec<bool> = {
        let mut v = vec![false; names.len()];
        for &c in &casting {
            v[c] = true;
        }
        v
    };
    for (line, id, ids) in owners {
        if is_casting[id] {
            return Err(Error::Parse {
                line,
                msg: format!("casting voter `{}` cannot have a delegation line", names[id]),
            });
        }
        rankings[id] = ids;
    }
    let instance = Instance::from_rankings(rankings, casting)?;
    if numbered {
        Ok(instance)
    } else {
        instance.with_names(names)
    }
}

/// Writes the text format. Fails on instances with rank gaps (reduced
/// instances), which the list encoding cannot represent.
pub fn write_v1(instance: &Instance) -> Result<String> {
    instance.check_contiguous_ranks()?;
    let mut out = String::new();
    if instance.names().is_none() {
        out.push_str(&format!("voters: {}\n", instance.n()));
    }
    let mut pending_casting: Vec<String> = Vec::new();
    for v in instance.voters() {
        if instance.is_casting(v) {
            pending_casting.push(instance.name(v));
            continue;
        }
        if !pending_casting.is_empty() {
            out.push_str(&format!("casting: {}\n", pending_casting.join(" ")));
            pending_casting.clear();
        }
        out.push_str(&instance.name(v));
        out.push(':');
        for e in instance.out_edges(v) {
            out.push(' ');
            out.push_str(&instance.name(e.target));
        }
        out.push('\n');
    }
    if !pending_casting.is_empty() {
        out.push_str(&format!("casting: {}\n", pending_casting.join(" ")));
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct JsonInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    voters: Option<usize>,
    #[serde(default)]
    casting: Vec<String>,
    #[serde(default)]
    delegations: Vec<JsonDelegation>,
}

#[derive(Serialize, Deserialize)]
struct JsonDelegation {
    voter: String,
    #[serde(default)]
    targets: Vec<String>,
}

/// Parses the JSON mirror:
/// `{"voters"?: n, "casting": [..], "delegations": [{"voter": .., "targets": [..]}]}`.
/// Ids follow delegation entries, then casting voters, then target-only names.
pub fn parse_json(text: &str) -> Result<Instance> {
    let doc: JsonInstance = serde_json::from_str(text)?;
    let mut decls = Vec::new();
    for (i, d) in doc.delegations.into_iter().enumerate() {
        decls.push((i + 1, Decl::Voter(d.voter, d.targets)));
    }
    let line = decls.len() + 1;
    decls.push((line, Decl::Casting(doc.casting)));
    build(Raw { voters: doc.voters, decls })
}

pub fn write_json(instance: &Instance) -> Result<String> {
    instance.check_contiguous_ranks()?;
    let doc = JsonInstance {
        voters: instance.names().is_none().then_some(instance.n()),
        casting: instance.casting_voters().map(|c| instance.name(c)).collect(),
        delegations: instance
            .voters()
            .filter(|&v| !instance.is_casting(v))
            .map(|v| JsonDelegation {
                voter: instance.name(v),
                targets: instance.out_edges(v).iter().map(|e| instance.name(e.target)).collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

fn is_json(path: &FsPath) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads an instance file; `.json` selects the JSON mirror.
pub fn load(path: impl AsRef<FsPath>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if is_json(path) {
        parse_json(&text)
    } else {
        parse_v1(&text)
    }
}

pub fn save(instance: &Instance, path: impl AsRef<FsPath>) -> Result<()> {
    let path = path.as_ref();
    let text = if is_json(path) { write_json(instance)? } else { write_v1(instance)? };
    std::fs::write(path, text)?;
    Ok(())
}

/// A base graph read from a whitespace-separated edge list (`u v` or `u v w`
/// per line, `#` and `%` start comments). Node labels are remapped to dense
/// ids in order of first appearance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeList {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize, Option<f64>)>,
}

impl EdgeList {
    pub fn n(&self) -> usize {
        self.labels.len()
    }
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut list = EdgeList::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split(['#', '%']).next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
        if fields.len() < 2 {
            return Err(Error::Parse { line: i + 1, msg: "expected `u v [weight]`".into() });
        }
        let mut id = |label: &str| -> usize {
            *index.entry(label.to_string()).or_insert_with(|| {
                list.labels.push(label.to_string());
                list.labels.len() - 1
            })
        };
        let u = id(fields[0]);
        let v = id(fields[1]);
        let w = match fields.get(2) {
            Some(s) => Some(s.parse::<f64>().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("invalid weight `{s}`"),
            })?),
            None => None,
        };
        list.edges.push((u, v, w));
    }
    Ok(list)
}
