use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::portfolio::RunRecord;

pub const SCHEMA: &str = "ibsaea.runs";
pub const SCHEMA_VERSION: u32 = 1;
pub const RUNS_FILE: &str = "runs.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RunKey {
    pub framework: String,
    pub problem: String,
    pub dimension: usize,
    pub seed: u64,
}

impl RunKey {
    pub fn of(record: &RunRecord) -> Self {
        Self {
            framework: record.framework.clone(),
            problem: record.problem.clone(),
            dimension: record.dimension,
            seed: record.seed,
        }
    }
}

impl fmt::Display for RunKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.framework, self.problem, self.dimension, self.seed)
    }
}

/// `framework:problem:dim[:seed]`, as used by the export command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySelector {
    pub framework: String,
    pub problem: String,
    pub dimension: usize,
    pub seed: Option<u64>,
}

impl KeySelector {
    pub fn matches(&self, key: &RunKey) -> bool {
        key.framework == self.framework
            && key.problem == self.problem
            && key.dimension == self.dimension
            && self.seed.is_none_or(|s| s == key.seed)
    }
}

impl FromStr for KeySelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(Error::Parse(format!("key '{s}' is not framework:problem:dim[:seed]")));
        }
        let dimension = parts[2].parse().map_err(|e| Error::Parse(format!("dimension in '{s}': {e}")))?;
        let seed = match parts.get(3) {
            Some(v) => Some(v.parse().map_err(|e| Error::Parse(format!("seed in '{s}': {e}")))?),
            None => None,
        };
        Ok(Self {
            framework: parts[0].to_string(),
            problem: parts[1].to_string(),
            dimension,
            seed,
        })
    }
}

impl fmt::Display for KeySelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.framework, self.problem, self.dimension)?;
        if let Some(s) = self.seed {
            write!(f, ":{s}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    schema: String,
    version: u32,
}

/// Run records kept sorted by key, no key stored twice.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsArchive {
    records: Vec<RunRecord>,
}

impl ResultsArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(records: Vec<RunRecord>) -> Result<Self> {
        let mut archive = Self::new();
        for r in records {
            archive.insert(r)?;
        }
        Ok(archive)
    }

    pub fn insert(&mut self, record: RunRecord) -> Result<()> {
        record.validate()?;
        let key = RunKey::of(&record);
        match self.records.binary_search_by(|r| RunKey::of(r).cmp(&key)) {
            Ok(_) => Err(Error::Mismatch(format!("duplicate run key {key}"))),
            Err(pos) => {
                self.records.insert(pos, record);
                Ok(())
            }
        }
    }

    pub fn records(&self) -> &[RunRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, key: &RunKey) -> Option<&RunRecord> {
        self.records
            .binary_search_by(|r| RunKey::of(r).cmp(key))
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn select(&self, selector: &KeySelector) -> Vec<&RunRecord> {
        self.records.iter().filter(|r| selector.matches(&RunKey::of(r))).collect()
    }

    pub fn to_jsonl(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        self.write_to(&mut out)?;
        Ok(out)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(
            &mut w,
            &Header {
                schema: SCHEMA.into(),
                version: SCHEMA_VERSION,
            },
        )?;
        w.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header: Header = match lines.next() {
            Some(line) => serde_json::from_str(&line?)?,
            None => return Err(Error::Parse("empty archive".into())),
        };
        if header.schema != SCHEMA || header.version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported archive schema {} v{}",
                header.schema, header.version
            )));
        }
        let mut archive = Self::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            archive.insert(serde_json::from_str(&line)?)?;
        }
        Ok(archive)
    }

    /// Load `runs.jsonl` from a file or from a results directory.
    pub fn load(path: &Path) -> Result<Self> {
        let file = if path.is_dir() { path.join(RUNS_FILE) } else { path.to_path_buf() };
        Self::read_from(BufReader::new(std::fs::File::open(&file)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(framework: &str, seed: u64) -> RunRecord {
        RunRecord {
            framework: framework.into(),
            problem: "sphere".into(),
            dimension: 1,
            seed,
            init_evaluations: 2,
            best_so_far: vec![3.0, 2.0, 2.0],
            selections: vec![crate::portfolio::SelectionEntry {
                generation: 1,
                constituents: vec!["ego-lcb".into()],
                first_evaluation: 3,
                evaluations: 1,
                batch_best: 2.5,
                reward: Some(0.5),
            }],
            final_best: 2.0,
            wall_time_secs: 0.0,
        }
    }

    #[test]
    fn keys_stay_sorted_and_unique() {
        let mut a = ResultsArchive::new();
        a.insert(record("ucb", 2)).unwrap();
        a.insert(record("par", 1)).unwrap();
        a.insert(record("ucb", 1)).unwrap();
        let keys: Vec<String> = a.records().iter().map(|r| RunKey::of(r).to_string()).collect();
        assert_eq!(keys, vec!["par:sphere:1:1", "ucb:sphere:1:1", "ucb:sphere:1:2"]);
        assert!(a.insert(record("par", 1)).is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let a = ResultsArchive::from_records(vec![record("rs", 0), record("eg50", 0)]).unwrap();
        let bytes = a.to_jsonl().unwrap();
        let b = ResultsArchive::read_from(bytes.as_slice()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_records_rejected_on_load() {
        let mut bad = record("rs", 0);
        bad.best_so_far = vec![1.0, 2.0, 2.0];
        bad.final_best = 2.0;
        let text = format!("{{\"schema\":\"{SCHEMA}\",\"version\":1}}\n{}\n", serde_json::to_string(&bad).unwrap());
        assert!(ResultsArchive::read_from(text.as_bytes()).is_err());
        assert!(ResultsArchive::read_from(&b"{\"schema\":\"other\",\"version\":1}\n"[..]).is_err());
    }

    #[test]
    fn selectors() {
        let k: KeySelector = "ucb:rastrigin:20".parse().unwrap();
        assert_eq!(k.seed, None);
        let k: KeySelector = "ucb:rastrigin:20:7".parse().unwrap();
        assert_eq!(k.seed, Some(7));
        assert!("ucb:rastrigin".parse::<KeySelector>().is_err());
        assert!("ucb:rastrigin:x".parse::<KeySelector>().is_err());
    }
}
