//! Token vocabularies with frequency statistics.
//!
//! Ids are dense: the four reserved specials occupy 0–3 and every other
//! token is assigned by descending corpus frequency with lexicographic
//! tie-breaking, so construction is deterministic regardless of how the
//! corpus was sharded.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

pub const PAD: u32 = 0;
pub const UNK: u32 = 1;
pub const BOS: u32 = 2;
pub const EOS: u32 = 3;

/// The reserved tokens, in id order.
pub const SPECIALS: [&str; 4] = ["<pad>", "<unk>", "<bos>", "<eos>"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("empty corpus: no token sequences supplied")]
    EmptyCorpus,
    #[error("vocabulary format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// Bidirectional token ↔ id map with frequency counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    freqs: Vec<u64>,
    id_of: BTreeMap<String, u32>,
}

impl Vocabulary {
    /// Counts tokens over `corpus` and keeps those seen at least `min_count`
    /// times. Empty sequences are legal; an empty corpus is not.
    pub fn build<'a, C, S>(corpus: C, min_count: u64) -> Result<Self, VocabError>
    where
        C: IntoIterator<Item = S>,
        S: IntoIterator<Item = &'a str>,
    {
        assert!(min_count >= 1, "min_count must be at least 1");
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut sequences = 0usize;
        for seq in corpus {
            sequences += 1;
            for tok in seq {
                *counts.entry(tok.to_string()).or_insert(0) += 1;
            }
        }
        if sequences == 0 {
            return Err(VocabError::EmptyCorpus);
        }

        let mut ranked: Vec<(String, u64)> = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count)
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        let mut tokens: Vec<String> = SPECIALS.iter().map(|s| s.to_string()).collect();
        let mut freqs: Vec<u64> = alloc::vec![0; SPECIALS.len()];
        for (tok, freq) in ranked {
            if SPECIALS.contains(&tok.as_str()) {
                // a corpus token spelled like a special keeps the special id
                let id = SPECIALS.iter().position(|&s| s == tok).unwrap();
                freqs[id] = freq;
                continue;
            }
            tokens.push(tok);
            freqs.push(freq);
        }
        let id_of = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Ok(Vocabulary {
            tokens,
            freqs,
            id_of,
        })
    }

    /// Total number of entries including the specials.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false // specials are always present
    }

    /// Vocabulary size excluding the reserved specials.
    pub fn content_len(&self) -> usize {
        self.tokens.len() - SPECIALS.len()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.id_of.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn freq(&self, token: &str) -> Option<u64> {
        self.id(token).map(|id| self.freqs[id as usize])
    }

    /// BOS + token ids (UNK for out-of-vocabulary) + EOS, truncated to
    /// `max_len` and padded with PAD to exactly `max_len`. Also returns the
    /// pre-padding true length.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S], max_len: usize) -> (Vec<u32>, usize) {
        assert!(max_len >= 2, "max_len must be at least 2");
        let mut ids = Vec::with_capacity(max_len);
        ids.push(BOS);
        for tok in tokens {
            ids.push(self.id(tok.as_ref()).unwrap_or(UNK));
        }
        ids.push(EOS);
        ids.truncate(max_len);
        let true_len = ids.len();
        ids.resize(max_len, PAD);
        (ids, true_len)
    }

    /// Inverse of `encode` for in-vocabulary sequences: strips specials and
    /// maps ids back to tokens (unknown ids render as the UNK token).
    pub fn decode(&self, ids: &[u32]) -> Vec<String> {
        ids.iter()
            .filter(|&&id| id != PAD && id != BOS && id != EOS)
            .map(|&id| {
                self.token(id)
                    .unwrap_or(SPECIALS[UNK as usize])
                    .to_string()
            })
            .collect()
    }

    /// One token per line: `token<TAB>id<TAB>freq`, specials first.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, tok) in self.tokens.iter().enumerate() {
            out.push_str(&format!("{tok}\t{i}\t{}\n", self.freqs[i]));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, VocabError> {
        let mut tokens = Vec::new();
        let mut freqs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            let (tok, id, freq) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(t), Some(i), Some(f), None) => (t, i, f),
                _ => {
                    return Err(VocabError::Format {
                        line: lineno + 1,
                        msg: String::from("expected token<TAB>id<TAB>freq"),
                    })
                }
            };
            let id: usize = id.parse().map_err(|_| VocabError::Format {
                line: lineno + 1,
                msg: format!("bad id '{id}'"),
            })?;
            if id != tokens.len() {
                return Err(VocabError::Format {
                    line: lineno + 1,
                    msg: format!("ids must be dense; expected {}, got {id}", tokens.len()),
                });
            }
            let freq: u64 = freq.parse().map_err(|_| VocabError::Format {
                line: lineno + 1,
                msg: format!("bad frequency '{freq}'"),
            })?;
            tokens.push(tok.to_string());
            freqs.push(freq);
        }
        if tokens.len() < SPECIALS.len()
            || SPECIALS
                .iter()
                .enumerate()
                .any(|(i, &s)| tokens[i] != s)
        {
            return Err(VocabError::Format {
                line: 1,
                msg: String::from("specials <pad> <unk> <bos> <eos> must hold ids 0-3"),
            });
        }
        let mut id_of = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if id_of.insert(t.clone(), i as u32).is_some() {
                return Err(VocabError::Format {
                    line: i + 1,
                    msg: format!("duplicate token '{t}'"),
                });
            }
        }
        Ok(Vocabulary {
            tokens,
            freqs,
            id_of,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seqs(xs: &[&[&str]]) -> Vec<Vec<&'static str>> {
        // helper keeps call sites terse; leaks nothing since &'static strs
        xs.iter().map(|s| s.to_vec()).collect::<Vec<_>>()
            .into_iter()
            .map(|v| v.into_iter().map(|t| -> &'static str {
                Box::leak(t.to_string().into_boxed_str())
            }).collect())
            .collect()
    }

    #[test]
    fn empty_sequences_yield_only_specials() {
        let v = Vocabulary::build(alloc::vec![Vec::<&str>::new(); 3], 1).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v.content_len(), 0);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let none: Vec<Vec<&str>> = Vec::new();
        assert_eq!(
            Vocabulary::build(none, 1).unwrap_err(),
            VocabError::EmptyCorpus
        );
    }

    #[test]
    fn frequency_then_lexicographic_ordering() {
        let corpus = seqs(&[&["C", "C", "O"], &["C", "C"]]);
        let v = Vocabulary::build(corpus.iter().map(|s| s.iter().copied()), 1).unwrap();
        assert_eq!(v.freq("C"), Some(4));
        assert_eq!(v.freq("O"), Some(1));
        assert_eq!(v.id("C"), Some(4));
        assert_eq!(v.id("O"), Some(5));
    }

    #[test]
    fn min_count_filters_rare_tokens() {
        let corpus = seqs(&[&["A", "A", "B"]]);
        let v = Vocabulary::build(corpus.iter().map(|s| s.iter().copied()), 2).unwrap();
        assert_eq!(v.id("A"), Some(4));
        assert_eq!(v.id("B"), None);
    }

    #[test]
    fn encode_pads_truncates_and_reports_length() {
        let corpus = seqs(&[&["C", "O"]]);
        let v = Vocabulary::build(corpus.iter().map(|s| s.iter().copied()), 1).unwrap();
        let (ids, len) = v.encode::<&str>(&[], 4);
        assert_eq!(ids, alloc::vec![BOS, EOS, PAD, PAD]);
        assert_eq!(len, 2);
        let (ids, len) = v.encode(&["C", "O"], 5);
        assert_eq!(ids, alloc::vec![BOS, 4, 5, EOS, PAD]);
        assert_eq!(len, 4);
        let (ids, _) = v.encode(&["C", "N"], 5);
        assert_eq!(ids[2], UNK);
        // truncation chops the tail once max_len is exhausted
        let (ids, len) = v.encode(&["C", "O", "C", "O"], 4);
        assert_eq!(len, 4);
        assert_eq!(ids.len(), 4);
        assert_eq!(ids[0], BOS);
    }

    #[test]
    fn decode_restores_in_vocab_tokens() {
        let corpus = seqs(&[&["C", "O", "N"]]);
        let v = Vocabulary::build(corpus.iter().map(|s| s.iter().copied()), 1).unwrap();
        let (ids, _) = v.encode(&["N", "C"], 8);
        assert_eq!(v.decode(&ids), alloc::vec!["N".to_string(), "C".to_string()]);
    }

    #[test]
    fn tsv_round_trip_is_identity() {
        let corpus = seqs(&[&["C", "C", "O", "[NH4+]"]]);
        let v = Vocabulary::build(corpus.iter().map(|s| s.iter().copied()), 1).unwrap();
        let restored = Vocabulary::from_tsv(&v.to_tsv()).unwrap();
        assert_eq!(v, restored);
    }

    #[test]
    fn corrupt_tsv_is_rejected() {
        assert!(matches!(
            Vocabulary::from_tsv("<pad>\t0\n"),
            Err(VocabError::Format { .. })
        ));
        assert!(matches!(
            Vocabulary::from_tsv("a\t0\t1\nb\t1\t1\nc\t2\t1\nd\t3\t1\n"),
            Err(VocabError::Format { .. })
        ));
    }
}
