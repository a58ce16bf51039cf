//! Labelled samples over `{0,1}^n` and their text format.
//!
//! The text format is a header line `n=<n> m=<m>` followed by one line per
//! example: `n` characters of `0`/`1`, a comma, and the label character.

use std::io::{BufRead, Write};

use crate::assignment::PartialAssignment;
use crate::bits::{get_bit, words_for, BitVec, MAX_DIMENSION};
use crate::error::{Error, Result};

/// A single labelled example.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example {
    pub bits: BitVec,
    pub label: bool,
}

impl Example {
    pub fn new(bits: BitVec, label: bool) -> Self {
        Example { bits, label }
    }
}

/// Borrowed view of one row of a [`Dataset`].
#[derive(Clone, Copy, Debug)]
pub struct ExampleRef<'a> {
    pub(crate) words: &'a [u64],
    pub label: bool,
}

impl<'a> ExampleRef<'a> {
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        get_bit(self.words, i)
    }

    #[inline]
    pub fn words(&self) -> &'a [u64] {
        self.words
    }
}

/// A sample `S` of examples sharing the dimension `n`, stored row-major in
/// packed words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
    labels: Vec<bool>,
}

impl Dataset {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_capacity(n, 0)
    }

    pub fn with_capacity(n: usize, m: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIMENSION {
            return Err(Error::InvalidParameter(format!(
                "dimension {n} outside 1..={MAX_DIMENSION}"
            )));
        }
        let stride = words_for(n);
        Ok(Dataset {
            n,
            stride,
            rows: Vec::with_capacity(stride * m),
            labels: Vec::with_capacity(m),
        })
    }

    pub fn from_examples(n: usize, examples: impl IntoIterator<Item = Example>) -> Result<Self> {
        let mut ds = Dataset::new(n)?;
        for ex in examples {
            ds.push(&ex)?;
        }
        Ok(ds)
    }

    pub fn push(&mut self, ex: &Example) -> Result<()> {
        if ex.bits.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: ex.bits.len(),
            });
        }
        self.rows.extend_from_slice(ex.bits.words());
        self.labels.push(ex.label);
        Ok(())
    }

    pub(crate) fn push_words(&mut self, words: &[u64], label: bool) {
        debug_assert_eq!(words.len(), self.stride);
        self.rows.extend_from_slice(words);
        self.labels.push(label);
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn get(&self, idx: usize) -> ExampleRef<'_> {
        ExampleRef {
            words: &self.rows[idx * self.stride..(idx + 1) * self.stride],
            label: self.labels[idx],
        }
    }

    pub fn example(&self, idx: usize) -> Example {
        let r = self.get(idx);
        Example::new(BitVec::from_words(self.n, r.words.to_vec()), r.label)
    }

    pub fn iter(&self) -> impl Iterator<Item = ExampleRef<'_>> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    /// `S_w`: the examples lying in the subcube `X_w`, in their original order.
    pub fn restrict(&self, w: &PartialAssignment) -> Result<Dataset> {
        if w.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: w.len(),
            });
        }
        let mut out = Dataset::new(self.n)?;
        for ex in self.iter().filter(|ex| w.matches_words(ex.words)) {
            out.push_words(ex.words, ex.label);
        }
        Ok(out)
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n={} m={}", self.n, self.len())?;
        let mut line = String::with_capacity(self.n + 3);
        for ex in self.iter() {
            line.clear();
            line.extend((0..self.n).map(|i| if ex.bit(i) { '1' } else { '0' }));
            line.push(',');
            line.push(if ex.label { '1' } else { '0' });
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("dataset text is ASCII")
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Dataset> {
        let mut lines = input.lines();
        let io_err = |line: usize, e: std::io::Error| Error::Parse {
            line,
            msg: e.to_string(),
        };
        let header = lines
            .next()
            .ok_or(Error::Parse { line: 1, msg: "missing header".into() })?
            .map_err(|e| io_err(1, e))?;
        let (n, m) = parse_header(&header)?;
        let mut ds = Dataset::with_capacity(n, m)?;
        for (idx, line) in lines.enumerate() {
            let lineno = idx + 2;
            let line = line.map_err(|e| io_err(lineno, e))?;
            let (bits, label) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: "expected '<bits>,<label>'".into(),
            })?;
            if bits.len() != n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {n} bits, found {}", bits.len()),
                });
            }
            let bits = BitVec::parse(bits).map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let label = match label {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("invalid label {other:?}"),
                    })
                }
            };
            ds.push(&Example::new(bits, label))?;
        }
        if ds.len() != m {
            return Err(Error::Parse {
                line: ds.len() + 2,
                msg: format!("header announces m={m} but {} examples follow", ds.len()),
            });
        }
        Ok(ds)
    }

    pub fn from_text(s: &str) -> Result<Dataset> {
        Dataset::read_text(s.as_bytes())
    }
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse {
        line: 1,
        msg: format!("malformed header {header:?}"),
    };
    let (n, m) = header.split_once(' ').ok_or_else(bad)?;
    let n = n.strip_prefix("n=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let m = m.strip_prefix("m=").ok_or_else(bad)?.parse().map_err(|_| bad())?;
    Ok((n, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_patterns_n2() -> Dataset {
        let rows = ["00,0", "01,1", "10,1", "11,0"];
        let text = format!("n=2 m=4\n{}\n", rows.join("\n"));
        Dataset::from_text(&text).unwrap()
    }

    #[test]
    fn restrict_filters_fixed_coordinates() {
        let s = all_patterns_n2();
        let w = PartialAssignment::parse("1*").unwrap();
        let r = s.restrict(&w).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|ex| ex.bit(0)));
        assert_eq!(r.example(0).bits.to_bit_string(), "10");
        assert_eq!(r.example(1).bits.to_bit_string(), "11");
    }

    #[test]
    fn restrict_all_free_is_identity() {
        let s = all_patterns_n2();
        assert_eq!(s.restrict(&PartialAssignment::free(2)).unwrap(), s);
    }

    #[test]
    fn restrict_can_be_empty() {
        let s = Dataset::from_text("n=2 m=2\n00,0\n01,1\n").unwrap();
        let r = s.restrict(&PartialAssignment::parse("1*").unwrap()).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn restrict_dimension_mismatch() {
        let s = all_patterns_n2();
        assert!(matches!(
            s.restrict(&PartialAssignment::free(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn text_round_trip_is_byte_identical() {
        let text = "n=3 m=3\n010,1\n111,0\n000,0\n";
        let ds = Dataset::from_text(text).unwrap();
        assert_eq!(ds.to_text(), text);
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(Dataset::from_text("n=2\n").is_err());
        assert!(Dataset::from_text("n=2 m=1\n011,1\n").is_err());
        assert!(Dataset::from_text("n=2 m=1\n01,2\n").is_err());
        assert!(Dataset::from_text("n=2 m=2\n01,1\n").is_err());
        assert!(Dataset::from_text("n=2 m=1\n01;1\n").is_err());
    }

    #[test]
    fn push_checks_dimension() {
        let mut ds = Dataset::new(3).unwrap();
        let ex = Example::new(BitVec::zeros(2), true);
        assert!(ds.push(&ex).is_err());
    }
}
