//! The structure file format: a category line, a signature line, a
//! domain line, then one default label per symbol and any number of
//! override lines `NAME e1 ... ek = LABEL`.
//!
//! `#` starts a comment anywhere on a line. The serializer is canonical:
//! equal label functions produce identical bytes, with each symbol's
//! default chosen as its majority label and override lines sorted.

use std::collections::BTreeSet;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::label::{Category, Label};
use crate::structure::{tuple_space_size, LStructure, Signature};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses the text form of a structure.
///
/// Errors carry the 1-based line number of the offending line; line 0
/// marks something missing at end of input.
pub fn parse_mps(text: &str) -> Result<LStructure> {
    let mut category: Option<Category> = None;
    let mut signature: Option<Signature> = None;
    let mut structure: Option<LStructure> = None;
    let mut defaults_seen: Vec<bool> = Vec::new();
    let mut overrides_seen: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if category.is_none() {
            if tokens.len() != 2 || tokens[0] != "category" {
                return Err(parse_err(line, "expected `category <01|star|empty|csp>` first"));
            }
            category = Some(
                Category::from_str(tokens[1])
                    .map_err(|_| parse_err(line, format!("unknown category `{}`", tokens[1])))?,
            );
            continue;
        }
        if signature.is_none() {
            if tokens[0] != "signature" {
                return Err(parse_err(line, "expected `signature NAME/ARITY ...` second"));
            }
            let mut entries: Vec<(String, usize)> = Vec::new();
            for part in &tokens[1..] {
                let (name, arity) = part
                    .split_once('/')
                    .ok_or_else(|| parse_err(line, format!("expected NAME/ARITY, got `{part}`")))?;
                let arity: usize = arity
                    .parse()
                    .map_err(|_| parse_err(line, format!("invalid arity in `{part}`")))?;
                entries.push((name.to_string(), arity));
            }
            let sig = Signature::new(entries).map_err(|e| parse_err(line, e.to_string()))?;
            defaults_seen = vec![false; sig.len()];
            signature = Some(sig);
            continue;
        }
        let sig = signature.as_ref().expect("signature parsed");
        if structure.is_none() {
            if tokens.len() != 2 || tokens[0] != "domain" {
                return Err(parse_err(line, "expected `domain N` third"));
            }
            let n: usize = tokens[1]
                .parse()
                .map_err(|_| parse_err(line, format!("invalid domain size `{}`", tokens[1])))?;
            structure = Some(LStructure::new(
                sig.clone(),
                category.expect("category parsed"),
                n,
            ));
            continue;
        }
        let s = structure.as_mut().expect("structure allocated");
        if tokens[0] == "default" {
            if tokens.len() != 3 {
                return Err(parse_err(line, "expected `default NAME LABEL`"));
            }
            let sym = sig
                .index_of(tokens[1])
                .ok_or_else(|| parse_err(line, format!("unknown symbol `{}`", tokens[1])))?;
            if defaults_seen[sym] {
                return Err(parse_err(
                    line,
                    format!("duplicate default for symbol `{}`", tokens[1]),
                ));
            }
            let label = Label::from_str(tokens[2])
                .map_err(|_| parse_err(line, format!("unknown label `{}`", tokens[2])))?;
            s.set_default(sym, label)
                .map_err(|e| parse_err(line, e.to_string()))?;
            defaults_seen[sym] = true;
            continue;
        }
        let sym = sig
            .index_of(tokens[0])
            .ok_or_else(|| parse_err(line, format!("unknown symbol `{}`", tokens[0])))?;
        let arity = sig.arity(sym);
        if tokens.len() != arity + 3 || tokens[arity + 1] != "=" {
            return Err(parse_err(
                line,
                format!("expected `{} e1 ... e{} = LABEL`", tokens[0], arity),
            ));
        }
        let mut tuple = Vec::with_capacity(arity);
        for tok in &tokens[1..=arity] {
            let e: usize = tok
                .parse()
                .map_err(|_| parse_err(line, format!("invalid element `{tok}`")))?;
            tuple.push(e);
        }
        let label = Label::from_str(tokens[arity + 2])
            .map_err(|_| parse_err(line, format!("unknown label `{}`", tokens[arity + 2])))?;
        if !overrides_seen.insert((sym, tuple.clone())) {
            return Err(parse_err(
                line,
                format!("duplicate assignment for `{}` at this tuple", tokens[0]),
            ));
        }
        s.set_label(sym, &tuple, label)
            .map_err(|e| parse_err(line, e.to_string()))?;
    }
    let s = match structure {
        Some(s) => s,
        None => {
            let missing = if category.is_none() {
                "category"
            } else if signature.is_none() {
                "signature"
            } else {
                "domain"
            };
            return Err(parse_err(0, format!("missing `{missing}` line")));
        }
    };
    for (sym, seen) in defaults_seen.iter().enumerate() {
        if !seen {
            return Err(parse_err(
                0,
                format!("missing default for symbol `{}`", s.signature().name(sym)),
            ));
        }
    }
    Ok(s)
}

/// The majority label of one symbol, ties broken toward the smallest
/// label token.
///
/// Counting uses the stored default/override split only; the tuple space
/// is never enumerated here.
fn majority_default(s: &LStructure, sym: usize) -> Label {
    let n = s.domain_size();
    let arity = s.signature().arity(sym);
    let space = match tuple_space_size(n, arity) {
        Some(v) => v,
        // An unenumerable tuple space cannot be out-voted by the finite
        // override list.
        None => return s.default_label(sym).expect("symbol in range"),
    };
    let stored = s.default_label(sym).expect("symbol in range");
    let overrides: Vec<Label> = s
        .overrides(sym)
        .expect("symbol in range")
        .map(|(_, l)| l)
        .collect();
    let mut best = stored;
    let mut best_count = space - overrides.len() as u128;
    for &candidate in s.category().labels() {
        let count = if candidate == stored {
            continue;
        } else {
            overrides.iter().filter(|&&l| l == candidate).count() as u128
        };
        if count > best_count || (count == best_count && candidate < best) {
            best = candidate;
            best_count = count;
        }
    }
    best
}

/// Serializes a structure canonically: majority defaults, sorted
/// override lines, one symbol after another in declaration order.
pub fn serialize_mps(s: &LStructure) -> String {
    let sig = s.signature();
    let mut out = String::new();
    out.push_str(&format!("category {}\n", s.category().token()));
    out.push_str("signature");
    for (name, arity) in sig.iter() {
        out.push_str(&format!(" {name}/{arity}"));
    }
    out.push('\n');
    out.push_str(&format!("domain {}\n", s.domain_size()));
    for sym in 0..sig.len() {
        let chosen = majority_default(s, sym);
        out.push_str(&format!("default {} {}\n", sig.name(sym), chosen.token()));
        let stored = s.default_label(sym).expect("symbol in range");
        if chosen == stored {
            for (tuple, label) in s.overrides(sym).expect("symbol in range") {
                push_override(&mut out, sig.name(sym), tuple, label);
            }
        } else {
            // The majority beat the stored default, so the non-chosen
            // tuples number at most the stored overrides; walking the
            // space stays proportional to the stored representation.
            let mut lines: Vec<(Vec<usize>, Label)> = Vec::new();
            crate::structure::for_each_tuple(s.domain_size(), sig.arity(sym), |tuple| {
                let label = s.get_label(sym, tuple).expect("tuple in range");
                if label != chosen {
                    lines.push((tuple.to_vec(), label));
                }
            });
            for (tuple, label) in lines {
                push_override(&mut out, sig.name(sym), &tuple, label);
            }
        }
    }
    out
}

fn push_override(out: &mut String, name: &str, tuple: &[usize], label: Label) {
    out.push_str(name);
    for e in tuple {
        out.push_str(&format!(" {e}"));
    }
    out.push_str(&format!(" = {}\n", label.token()));
}
