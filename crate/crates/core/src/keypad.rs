//! Keypad symbols, tone frequencies and deterministic synthesis.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Low-group (row) frequencies in Hz.
pub const ROW_FREQS_HZ: [f64; 4] = [697.0, 770.0, 852.0, 941.0];

/// High-group (column) frequencies in Hz.
pub const COL_FREQS_HZ: [f64; 4] = [1209.0, 1336.0, 1477.0, 1633.0];

/// All eight bank frequencies, rows first.
pub const BANK_FREQS_HZ: [f64; 8] = [
    697.0, 770.0, 852.0, 941.0, 1209.0, 1336.0, 1477.0, 1633.0,
];

/// One of the sixteen keypad symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    One,
    Two,
    Three,
    A,
    Four,
    Five,
    Six,
    B,
    Seven,
    Eight,
    Nine,
    C,
    Star,
    Zero,
    Pound,
    D,
}

/// Keypad grid, `GRID[row][col]`.
const GRID: [[Symbol; 4]; 4] = [
    [Symbol::One, Symbol::Two, Symbol::Three, Symbol::A],
    [Symbol::Four, Symbol::Five, Symbol::Six, Symbol::B],
    [Symbol::Seven, Symbol::Eight, Symbol::Nine, Symbol::C],
    [Symbol::Star, Symbol::Zero, Symbol::Pound, Symbol::D],
];

impl Symbol {
    /// Every symbol in row-major keypad order.
    pub const ALL: [Symbol; 16] = [
        Symbol::One,
        Symbol::Two,
        Symbol::Three,
        Symbol::A,
        Symbol::Four,
        Symbol::Five,
        Symbol::Six,
        Symbol::B,
        Symbol::Seven,
        Symbol::Eight,
        Symbol::Nine,
        Symbol::C,
        Symbol::Star,
        Symbol::Zero,
        Symbol::Pound,
        Symbol::D,
    ];

    /// The twelve symbols of the standard three-column keypad.
    pub const STANDARD: [Symbol; 12] = [
        Symbol::One,
        Symbol::Two,
        Symbol::Three,
        Symbol::Four,
        Symbol::Five,
        Symbol::Six,
        Symbol::Seven,
        Symbol::Eight,
        Symbol::Nine,
        Symbol::Star,
        Symbol::Zero,
        Symbol::Pound,
    ];

    pub fn from_char(c: char) -> Result<Symbol> {
        Ok(match c {
            '1' => Symbol::One,
            '2' => Symbol::Two,
            '3' => Symbol::Three,
            '4' => Symbol::Four,
            '5' => Symbol::Five,
            '6' => Symbol::Six,
            '7' => Symbol::Seven,
            '8' => Symbol::Eight,
            '9' => Symbol::Nine,
            '0' => Symbol::Zero,
            '*' => Symbol::Star,
            '#' => Symbol::Pound,
            'A' | 'a' => Symbol::A,
            'B' | 'b' => Symbol::B,
            'C' | 'c' => Symbol::C,
            'D' | 'd' => Symbol::D,
            other => return Err(Error::InvalidSymbol(other)),
        })
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::One => '1',
            Symbol::Two => '2',
            Symbol::Three => '3',
            Symbol::Four => '4',
            Symbol::Five => '5',
            Symbol::Six => '6',
            Symbol::Seven => '7',
            Symbol::Eight => '8',
            Symbol::Nine => '9',
            Symbol::Zero => '0',
            Symbol::Star => '*',
            Symbol::Pound => '#',
            Symbol::A => 'A',
            Symbol::B => 'B',
            Symbol::C => 'C',
            Symbol::D => 'D',
        }
    }

    /// Row and column index into the keypad grid.
    pub fn grid_position(self) -> (usize, usize) {
        let idx = Symbol::ALL.iter().position(|&s| s == self).unwrap();
        (idx / 4, idx % 4)
    }

    /// Inverse of [`Symbol::grid_position`].
    pub fn from_grid(row: usize, col: usize) -> Option<Symbol> {
        GRID.get(row).and_then(|r| r.get(col)).copied()
    }

    /// `(f_row, f_col)` in Hz.
    pub fn frequencies(self) -> (f64, f64) {
        let (r, c) = self.grid_position();
        (ROW_FREQS_HZ[r], COL_FREQS_HZ[c])
    }

    /// True for the A-D symbols carried on the 1633 Hz column.
    pub fn is_extended(self) -> bool {
        self.grid_position().1 == 3
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Row/column frequency pair of a keypad glyph.
pub fn symbol_frequencies(glyph: char) -> Result<(f64, f64)> {
    Symbol::from_char(glyph).map(Symbol::frequencies)
}

/// Parses a dial string, dropping `-` and whitespace separators.
pub fn parse_dial_string(s: &str) -> Result<Vec<Symbol>> {
    s.chars()
        .filter(|c| *c != '-' && !c.is_whitespace())
        .map(Symbol::from_char)
        .collect()
}

pub fn symbols_to_string(symbols: &[Symbol]) -> String {
    symbols.iter().map(|s| s.to_char()).collect()
}

/// Converts a frequency in Hz to radians per sample.
pub fn hz_to_radians(freq: f64, fs: f64) -> f64 {
    2.0 * PI * freq / fs
}

/// Angular frequencies of a symbol's tone pair at a given sample rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadianPair {
    pub w_row: f64,
    pub w_col: f64,
    pub fs: f64,
}

pub fn radian_pair(symbol: Symbol, fs: f64) -> Result<RadianPair> {
    check_sample_rate(symbol, fs)?;
    let (f_row, f_col) = symbol.frequencies();
    Ok(RadianPair {
        w_row: hz_to_radians(f_row, fs),
        w_col: hz_to_radians(f_col, fs),
        fs,
    })
}

fn check_sample_rate(symbol: Symbol, fs: f64) -> Result<()> {
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::InvalidSampleRate(fs));
    }
    let (_, f_col) = symbol.frequencies();
    if fs <= 2.0 * f_col {
        return Err(Error::Aliasing {
            fs,
            freq: f_col,
            nyquist: 2.0 * f_col,
        });
    }
    Ok(())
}

/// Real-valued samples at a known sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalBuffer {
    pub samples: Vec<f64>,
    pub fs: f64,
}

impl SignalBuffer {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidSampleRate(fs));
        }
        Ok(SignalBuffer { samples, fs })
    }

    pub fn zeros(len: usize, fs: f64) -> Result<Self> {
        SignalBuffer::new(vec![0.0; len], fs)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of the squared samples; zero for an empty buffer.
    pub fn mean_square(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }

    /// Copy of `len` samples starting at `start`, clipped to the buffer end.
    pub fn slice(&self, start: usize, len: usize) -> SignalBuffer {
        let start = start.min(self.samples.len());
        let end = start.saturating_add(len).min(self.samples.len());
        SignalBuffer {
            samples: self.samples[start..end].to_vec(),
            fs: self.fs,
        }
    }

    pub fn scaled(&self, alpha: f64) -> SignalBuffer {
        SignalBuffer {
            samples: self.samples.iter().map(|v| v * alpha).collect(),
            fs: self.fs,
        }
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }
}

/// A duration that is either shared by every digit/gap or given per item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Durations {
    Fixed(usize),
    PerItem(Vec<usize>),
}

impl Durations {
    fn get(&self, i: usize) -> usize {
        match self {
            Durations::Fixed(v) => *v,
            Durations::PerItem(v) => v[i],
        }
    }

    fn check(&self, what: &str, needed: usize, min: usize) -> Result<()> {
        match self {
            Durations::Fixed(v) if *v < min && needed > 0 => Err(Error::Profile(format!(
                "{what} duration {v} is below the minimum of {min}"
            ))),
            Durations::PerItem(v) if v.len() != needed => Err(Error::Profile(format!(
                "{} {what} values given, {needed} required",
                v.len()
            ))),
            Durations::PerItem(v) => match v.iter().find(|&&d| d < min) {
                Some(d) => Err(Error::Profile(format!(
                    "{what} duration {d} is below the minimum of {min}"
                ))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

/// Mark (tone) and Space (silence) durations, in samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingProfile {
    pub marks: Durations,
    pub spaces: Durations,
    /// Append a space after the final digit as well.
    pub trailing_space: bool,
}

impl TimingProfile {
    pub fn fixed(mark: usize, space: usize) -> Self {
        TimingProfile {
            marks: Durations::Fixed(mark),
            spaces: Durations::Fixed(space),
            trailing_space: false,
        }
    }

    pub fn per_item(marks: Vec<usize>, spaces: Vec<usize>, trailing_space: bool) -> Self {
        TimingProfile {
            marks: Durations::PerItem(marks),
            spaces: Durations::PerItem(spaces),
            trailing_space,
        }
    }

    /// Number of spaces a dial string of `digits` symbols needs.
    pub fn space_count(&self, digits: usize) -> usize {
        match digits {
            0 => 0,
            n if self.trailing_space => n,
            n => n - 1,
        }
    }

    pub fn validate(&self, digits: usize) -> Result<()> {
        self.marks.check("mark", digits, 1)?;
        self.spaces.check("space", self.space_count(digits), 0)
    }

    pub fn mark(&self, i: usize) -> usize {
        self.marks.get(i)
    }

    pub fn space(&self, i: usize) -> usize {
        self.spaces.get(i)
    }

    /// Ground-truth `(start, len)` of every Mark for a string of `digits` symbols.
    pub fn mark_bounds(&self, digits: usize) -> Result<Vec<(usize, usize)>> {
        self.validate(digits)?;
        let mut bounds = Vec::with_capacity(digits);
        let mut pos = 0;
        for i in 0..digits {
            let mark = self.mark(i);
            bounds.push((pos, mark));
            pos += mark;
            if i < self.space_count(digits) {
                pos += self.space(i);
            }
        }
        Ok(bounds)
    }

    /// Total signal length for a string of `digits` symbols.
    pub fn total_len(&self, digits: usize) -> Result<usize> {
        self.validate(digits)?;
        let marks: usize = (0..digits).map(|i| self.mark(i)).sum();
        let spaces: usize = (0..self.space_count(digits)).map(|i| self.space(i)).sum();
        Ok(marks + spaces)
    }
}

/// `sin(w_row n) + sin(w_col n)` for `n = 0..n_samples`.
pub fn synthesize_digit(symbol: Symbol, n_samples: usize, fs: f64) -> Result<SignalBuffer> {
    let pair = radian_pair(symbol, fs)?;
    let samples = (0..n_samples).map(|n| tone_sample(&pair, n)).collect();
    SignalBuffer::new(samples, fs)
}

#[inline]
fn tone_sample(pair: &RadianPair, n: usize) -> f64 {
    let n = n as f64;
    (pair.w_row * n).sin() + (pair.w_col * n).sin()
}

/// Concatenates tone bursts separated by zero-valued gaps.
///
/// Each burst restarts at phase zero.
pub fn synthesize_sequence(
    symbols: &[Symbol],
    timing: &TimingProfile,
    fs: f64,
) -> Result<SignalBuffer> {
    let total = timing.total_len(symbols.len())?;
    let mut samples = Vec::with_capacity(total);
    for (i, &symbol) in symbols.iter().enumerate() {
        let pair = radian_pair(symbol, fs)?;
        samples.extend((0..timing.mark(i)).map(|n| tone_sample(&pair, n)));
        if i < timing.space_count(symbols.len()) {
            samples.resize(samples.len() + timing.space(i), 0.0);
        }
    }
    debug_assert_eq!(samples.len(), total);
    SignalBuffer::new(samples, fs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 8192.0;

    #[test]
    fn table_frequencies() {
        assert_eq!(symbol_frequencies('2').unwrap(), (697.0, 1336.0));
        assert_eq!(symbol_frequencies('5').unwrap(), (770.0, 1336.0));
        assert_eq!(symbol_frequencies('D').unwrap(), (941.0, 1633.0));
        assert_eq!(symbol_frequencies('*').unwrap(), (941.0, 1209.0));
        assert!(matches!(symbol_frequencies('x'), Err(Error::InvalidSymbol('x'))));
    }

    #[test]
    fn grid_is_a_bijection() {
        let mut seen = std::collections::HashSet::new();
        for s in Symbol::ALL {
            let (r, c) = s.grid_position();
            assert_eq!(Symbol::from_grid(r, c), Some(s));
            let (f_row, f_col) = s.frequencies();
            assert!(seen.insert((f_row as u32, f_col as u32)));
            assert_eq!(Symbol::from_char(s.to_char()).unwrap(), s);
        }
        assert_eq!(seen.len(), 16);
        assert_eq!(Symbol::from_grid(4, 0), None);
    }

    #[test]
    fn radians_match_table_two() {
        let close = |a: f64, b: f64| (a - b).abs() < 5e-4;
        let p = radian_pair(Symbol::Two, FS).unwrap();
        assert!(close(p.w_row, 0.5346) && close(p.w_col, 1.0247), "{p:?}");
        let p = radian_pair(Symbol::One, FS).unwrap();
        assert!(close(p.w_row, 0.5346) && close(p.w_col, 0.927), "{p:?}");
        let p = radian_pair(Symbol::Zero, FS).unwrap();
        assert!(close(p.w_row, 0.7217) && close(p.w_col, 1.0247), "{p:?}");
    }

    #[test]
    fn nyquist_is_enforced() {
        assert!(matches!(
            radian_pair(Symbol::D, 3000.0),
            Err(Error::Aliasing { .. })
        ));
        // 2 * 1336 = 2672 is not strictly above the limit
        assert!(radian_pair(Symbol::Two, 2672.0).is_err());
        assert!(radian_pair(Symbol::Two, 2673.0).is_ok());
        assert!(synthesize_digit(Symbol::Two, 10, 0.0).is_err());
    }

    #[test]
    fn digit_two_closed_form() {
        let x = synthesize_digit(Symbol::Two, 1000, FS).unwrap();
        let w_row = 2.0 * PI * 697.0 / FS;
        let w_col = 2.0 * PI * 1336.0 / FS;
        for (n, v) in x.samples.iter().enumerate() {
            let expect = (w_row * n as f64).sin() + (w_col * n as f64).sin();
            assert_eq!(*v, expect);
        }
        assert_eq!(x.samples[0], 0.0);
        assert!(x.samples.iter().all(|v| v.abs() <= 2.0));
    }

    #[test]
    fn empty_digit() {
        assert!(synthesize_digit(Symbol::Nine, 0, FS).unwrap().is_empty());
    }

    #[test]
    fn sequence_lengths() {
        let symbols = parse_dial_string("247-448-1221").unwrap();
        assert_eq!(symbols.len(), 10);
        let x = synthesize_sequence(&symbols, &TimingProfile::fixed(1000, 100), FS).unwrap();
        assert_eq!(x.len(), 10_900);

        let mut trailing = TimingProfile::fixed(1000, 100);
        trailing.trailing_space = true;
        let x = synthesize_sequence(&symbols, &trailing, FS).unwrap();
        assert_eq!(x.len(), 11_000);

        let empty = synthesize_sequence(&[], &TimingProfile::fixed(1000, 100), FS).unwrap();
        assert!(empty.is_empty());

        // 40 ms at 8192 Hz
        let mark = (0.040 * FS).round() as usize;
        assert_eq!(mark, 328);
        let one = synthesize_sequence(&[Symbol::Two], &TimingProfile::fixed(mark, 0), FS).unwrap();
        assert_eq!(one.len(), 328);
    }

    #[test]
    fn gaps_are_silent_and_bursts_restart_phase() {
        let symbols = parse_dial_string("49158").unwrap();
        let timing = TimingProfile::per_item(
            vec![900, 1050, 980, 1300, 680],
            vec![150, 201, 21, 400],
            false,
        );
        let x = synthesize_sequence(&symbols, &timing, FS).unwrap();
        let bounds = timing.mark_bounds(symbols.len()).unwrap();
        assert_eq!(x.len(), 900 + 1050 + 980 + 1300 + 680 + 150 + 201 + 21 + 400);
        for w in bounds.windows(2) {
            let gap_end = w[1].0;
            let gap_start = w[0].0 + w[0].1;
            assert!(x.samples[gap_start..gap_end].iter().all(|&v| v == 0.0));
        }
        for (&(start, len), &s) in bounds.iter().zip(&symbols) {
            let burst = synthesize_digit(s, len, FS).unwrap();
            assert_eq!(&x.samples[start..start + len], &burst.samples[..]);
        }
    }

    #[test]
    fn profile_mismatch_is_rejected() {
        let symbols = parse_dial_string("123").unwrap();
        let short = TimingProfile::per_item(vec![100, 100], vec![10, 10], false);
        assert!(matches!(
            synthesize_sequence(&symbols, &short, FS),
            Err(Error::Profile(_))
        ));
        let zero_mark = TimingProfile::per_item(vec![100, 0, 100], vec![10, 10], false);
        assert!(zero_mark.validate(3).is_err());
        let trailing = TimingProfile::per_item(vec![100; 3], vec![10, 10], true);
        assert!(trailing.validate(3).is_err());
        assert!(TimingProfile::fixed(0, 10).validate(2).is_err());
    }

    #[test]
    fn separators_are_stripped() {
        let s = parse_dial_string("247 448-1221").unwrap();
        assert_eq!(symbols_to_string(&s), "2474481221");
        assert!(parse_dial_string("12x").is_err());
    }

    #[test]
    fn synthesis_is_deterministic() {
        let symbols = parse_dial_string("2474481221").unwrap();
        let t = TimingProfile::fixed(1000, 100);
        let a = synthesize_sequence(&symbols, &t, FS).unwrap();
        let b = synthesize_sequence(&symbols, &t, FS).unwrap();
        assert!(a.samples.iter().zip(&b.samples).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
