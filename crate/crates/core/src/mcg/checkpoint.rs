//! Orbit checkpoint files.
//!
//! ```text
//! orbicount-orbit v1 <signature-hash> L=<bound> slack=<slack>[ functional=word][ stabilized=true]
//! <canonical word>\t<length>
//! ```
//!
//! Members are appended layer by layer while a pass runs, and the file is
//! rewritten sorted once the orbit is complete. `stabilized=true` marks a
//! complete orbit that a larger slack reproduced.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::orbit::{enumerate, Functional, Member, MemberSink, OrbitOptions, OrbitOutcome};
use super::{Automorphism, McgError};
use crate::orbifold::{FuchsianGroup, OrbifoldSignature};
use crate::words::Word;

const MAGIC: &str = "orbicount-orbit";
const VERSION: &str = "v1";

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub signature_hash: String,
    pub bound: f64,
    pub slack: f64,
    pub functional: Functional,
    pub stabilized: bool,
    pub entries: Vec<(Word, f64)>,
}

fn io_err(e: std::io::Error) -> McgError {
    McgError::Io(e.to_string())
}

pub fn header(hash: &str, bound: f64, slack: f64, functional: Functional) -> String {
    let mut h = format!("{MAGIC} {VERSION} {hash} L={bound} slack={slack}");
    if functional == Functional::WordLength {
        h.push_str(" functional=word");
    }
    h
}

fn write_entries(out: &mut impl Write, sig: &OrbifoldSignature, members: &[Member]) -> std::io::Result<()> {
    for m in members {
        writeln!(out, "{}\t{}", m.word.to_text(sig), m.length)?;
    }
    Ok(())
}

/// Writes a complete, sorted checkpoint.
pub fn write_checkpoint(
    path: &Path,
    sig: &OrbifoldSignature,
    bound: f64,
    slack: f64,
    functional: Functional,
    stabilized: bool,
    members: &[Member],
) -> Result<(), McgError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    let mut head = header(&sig.hash(), bound, slack, functional);
    if stabilized {
        head.push_str(" stabilized=true");
    }
    writeln!(out, "{head}").map_err(io_err)?;
    write_entries(&mut out, sig, members).map_err(io_err)?;
    out.flush().map_err(io_err)
}

pub fn read_checkpoint(path: &Path, sig: &OrbifoldSignature) -> Result<Checkpoint, McgError> {
    let file = File::open(path).map_err(io_err)?;
    let mut lines = BufReader::new(file).lines();
    let bad = |line: usize, msg: &str| McgError::Checkpoint(format!("{}:{line}: {msg}", path.display()));
    let head = lines.next().ok_or_else(|| bad(1, "empty file"))?.map_err(io_err)?;
    let fields: Vec<&str> = head.split_whitespace().collect();
    if fields.len() < 5 || fields[0] != MAGIC || fields[1] != VERSION {
        return Err(bad(1, "not an orbit checkpoint header"));
    }
    let signature_hash = fields[2].to_string();
    if signature_hash != sig.hash() {
        return Err(bad(1, &format!("signature hash {} does not match {}", signature_hash, sig.hash())));
    }
    let mut bound = None;
    let mut slack = None;
    let mut functional = Functional::Hyperbolic;
    let mut stabilized = false;
    for f in &fields[3..] {
        match f.split_once('=') {
            Some(("L", v)) => bound = v.parse::<f64>().ok(),
            Some(("slack", v)) => slack = v.parse::<f64>().ok(),
            Some(("functional", v)) => functional = v.parse().map_err(|e: String| bad(1, &e))?,
            Some(("stabilized", v)) => stabilized = v.parse().map_err(|_| bad(1, "bad stabilized flag"))?,
            _ => return Err(bad(1, &format!("unexpected header field `{f}`"))),
        }
    }
    let bound = bound.ok_or_else(|| bad(1, "missing L"))?;
    let slack = slack.ok_or_else(|| bad(1, "missing slack"))?;
    let mut entries = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let (w, l) = line.split_once('\t').ok_or_else(|| bad(i + 2, "expected word<TAB>length"))?;
        let word = Word::parse(w, sig).map_err(|e| bad(i + 2, &e.to_string()))?;
        let length: f64 = l.trim().parse().map_err(|_| bad(i + 2, "bad length"))?;
        entries.push((word, length));
    }
    Ok(Checkpoint { signature_hash, bound, slack, functional, stabilized, entries })
}

/// Streams members into a checkpoint file; each pass restarts the file.
pub struct CheckpointWriter<'a> {
    path: PathBuf,
    sig: &'a OrbifoldSignature,
    bound: f64,
    functional: Functional,
    out: Option<BufWriter<File>>,
}

impl<'a> CheckpointWriter<'a> {
    pub fn new(path: &Path, sig: &'a OrbifoldSignature, bound: f64, functional: Functional) -> Self {
        CheckpointWriter { path: path.to_path_buf(), sig, bound, functional, out: None }
    }

    fn finish(&mut self) -> Result<(), McgError> {
        if let Some(mut out) = self.out.take() {
            out.flush().map_err(io_err)?;
        }
        Ok(())
    }
}

impl MemberSink for CheckpointWriter<'_> {
    fn begin_pass(&mut self, slack: f64) -> Result<(), McgError> {
        self.finish()?;
        let mut out = BufWriter::new(File::create(&self.path).map_err(io_err)?);
        writeln!(out, "{}", header(&self.sig.hash(), self.bound, slack, self.functional)).map_err(io_err)?;
        self.out = Some(out);
        Ok(())
    }

    fn layer(&mut self, members: &[Member]) -> Result<(), McgError> {
        if let Some(out) = self.out.as_mut() {
            write_entries(out, self.sig, members).map_err(io_err)?;
            out.flush().map_err(io_err)?;
        }
        Ok(())
    }
}

/// Runs an enumeration that streams to `path`. On completion the file is
/// rewritten sorted; on interruption it holds the members found so far.
pub fn enumerate_to_file(
    seed: &Word,
    group: &FuchsianGroup,
    autos: &[Automorphism],
    opts: &OrbitOptions,
    path: &Path,
) -> Result<OrbitOutcome, McgError> {
    let sig = group.signature();
    let mut writer = CheckpointWriter::new(path, sig, opts.bound, opts.functional);
    let outcome = enumerate(seed, group, autos, opts, &mut writer)?;
    writer.finish()?;
    if let OrbitOutcome::Complete(ball) = &outcome {
        write_checkpoint(path, sig, ball.bound, ball.slack, ball.functional, ball.stabilized, &ball.members)?;
    }
    Ok(outcome)
}

/// Continues an interrupted run from its checkpoint.
pub fn resume_from_file(
    seed: &Word,
    group: &FuchsianGroup,
    autos: &[Automorphism],
    opts: &OrbitOptions,
    path: &Path,
) -> Result<OrbitOutcome, McgError> {
    let cp = read_checkpoint(path, group.signature())?;
    if cp.bound != opts.bound || cp.functional != opts.functional {
        return Err(McgError::Checkpoint(format!(
            "checkpoint was written for L={} functional={}, requested L={} functional={}",
            cp.bound, cp.functional, opts.bound, opts.functional
        )));
    }
    let mut resumed = opts.clone();
    resumed.slack = cp.slack;
    resumed.extra_seeds = cp.entries.into_iter().map(|(w, _)| w).collect();
    enumerate_to_file(seed, group, autos, &resumed, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_format() {
        assert_eq!(
            header("0123456789abcdef", 7.5, 2.0, Functional::Hyperbolic),
            "orbicount-orbit v1 0123456789abcdef L=7.5 slack=2"
        );
        assert!(header("h", 3.0, 1.0, Functional::WordLength).ends_with(" functional=word"));
    }

    #[test]
    fn round_trip() {
        let sig: OrbifoldSignature = "g=1 cones=3".parse().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.txt");
        let members = vec![Member { word: Word::parse("a b^-1", &sig).unwrap(), length: 3.25, word_length: 2 }];
        write_checkpoint(&path, &sig, 9.0, 1.0, Functional::Hyperbolic, true, &members).unwrap();
        let cp = read_checkpoint(&path, &sig).unwrap();
        assert_eq!(cp.bound, 9.0);
        assert!(cp.stabilized);
        assert_eq!(cp.entries, vec![(members[0].word.clone(), 3.25)]);
        let other: OrbifoldSignature = "g=2 cones=-".parse().unwrap();
        assert!(read_checkpoint(&path, &other).is_err());
    }
}
