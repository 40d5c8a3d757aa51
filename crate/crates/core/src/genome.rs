//! Chromosome layout, validation, random initialization, mutation and decoding.
//!
//! A chromosome is 50 integer genes, read positionally:
//!
//! ```text
//!  genes  1-24  placement template, 0-6 (0 = empty cell)
//!  genes 25-30  movement logic per piece type, 1-6
//!  genes 31-36  step size per type, 0 = single, 1 = multiple
//!  genes 37-42  capture logic per type, 0 = step into, 1 = step over
//!  gene     43  piece of honor, 0-6 (0 = none)
//!  genes 44-49  conversion target per type, 0-6 (0 = none)
//!  gene     50  mandatory capture, 0/1
//! ```
//!
//! Gene numbers in diagnostics are 1-based to match the layout above.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::GenomeError;

pub const GENE_COUNT: usize = 50;
pub const PLACEMENT_CELLS: usize = 24;
pub const PIECE_TYPES: usize = 6;

const MOVEMENT_START: usize = 24;
const STEP_START: usize = 30;
const CAPTURE_START: usize = 36;
const HONOR_GENE: usize = 42;
const CONVERSION_START: usize = 43;
const MANDATORY_GENE: usize = 49;

/// Default per-gene resampling probability used by the evolutionary loop.
pub const DEFAULT_MUTATION_RATE: f64 = 0.3;

/// Inclusive legal range of the gene at zero-based position `index`.
pub fn gene_range(index: usize) -> (u8, u8) {
    match index {
        0..=23 => (0, 6),
        24..=29 => (1, 6),
        30..=41 => (0, 1),
        42..=48 => (0, 6),
        49 => (0, 1),
        _ => panic!("gene index {index} out of bounds"),
    }
}

fn gene_role(index: usize) -> &'static str {
    match index {
        0..=23 => "placement",
        24..=29 => "movement",
        30..=35 => "step size",
        36..=41 => "capture",
        42 => "piece of honor",
        43..=48 => "conversion",
        _ => "mandatory capture",
    }
}

/// A piece type id in `1..=6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct PieceType(u8);

impl PieceType {
    pub const ALL: [PieceType; 6] = [
        PieceType(1),
        PieceType(2),
        PieceType(3),
        PieceType(4),
        PieceType(5),
        PieceType(6),
    ];

    pub fn new(id: u8) -> Option<Self> {
        (1..=6).contains(&id).then_some(PieceType(id))
    }

    pub fn id(self) -> u8 {
        self.0
    }

    /// Zero-based index into per-type tables.
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }

    /// Decodes a zero-sentinel gene: 0 means "none".
    fn from_optional_gene(gene: u8) -> Option<Self> {
        PieceType::new(gene)
    }
}

impl TryFrom<u8> for PieceType {
    type Error = String;

    fn try_from(id: u8) -> Result<Self, Self::Error> {
        PieceType::new(id).ok_or_else(|| format!("piece type {id} outside 1-6"))
    }
}

impl From<PieceType> for u8 {
    fn from(t: PieceType) -> u8 {
        t.0
    }
}

impl fmt::Display for PieceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Movement {
    DiagFwd,
    DiagFwdBack,
    AllDirs,
    LShape,
    StraightFwdBack,
    StraightFwd,
}

impl Movement {
    pub fn from_gene(gene: u8) -> Option<Self> {
        Some(match gene {
            1 => Movement::DiagFwd,
            2 => Movement::DiagFwdBack,
            3 => Movement::AllDirs,
            4 => Movement::LShape,
            5 => Movement::StraightFwdBack,
            6 => Movement::StraightFwd,
            _ => return None,
        })
    }

    pub fn gene(self) -> u8 {
        match self {
            Movement::DiagFwd => 1,
            Movement::DiagFwdBack => 2,
            Movement::AllDirs => 3,
            Movement::LShape => 4,
            Movement::StraightFwdBack => 5,
            Movement::StraightFwd => 6,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Movement::DiagFwd => "Diagonal Forward",
            Movement::DiagFwdBack => "Diagonal Forward & Backward",
            Movement::AllDirs => "All Directions",
            Movement::LShape => "L",
            Movement::StraightFwdBack => "Straight Forward & Backward",
            Movement::StraightFwd => "Straight Forward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepSize {
    Single,
    Multiple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Capture {
    StepInto,
    StepOver,
}

/// Rules attached to one piece type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PieceRules {
    pub movement: Movement,
    pub step: StepSize,
    pub capture: Capture,
    pub conversion: Option<PieceType>,
}

/// Decoded phenotype of a chromosome.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleSet {
    pub pieces: [PieceRules; PIECE_TYPES],
    pub piece_of_honor: Option<PieceType>,
    pub mandatory_capture: bool,
    /// Player One's three home rows, row-major from a1: index 0 is a1, 8 is a2, 23 is h3.
    pub placement: [Option<PieceType>; PLACEMENT_CELLS],
}

impl RuleSet {
    pub fn piece(&self, t: PieceType) -> &PieceRules {
        &self.pieces[t.index()]
    }

    /// Pieces per player in the initial setup.
    pub fn pieces_per_player(&self) -> usize {
        self.placement.iter().filter(|c| c.is_some()).count()
    }

    pub fn encode(&self) -> Chromosome {
        let mut genes = [0u8; GENE_COUNT];
        for (g, cell) in genes.iter_mut().zip(self.placement.iter()) {
            *g = cell.map_or(0, PieceType::id);
        }
        for (i, p) in self.pieces.iter().enumerate() {
            genes[MOVEMENT_START + i] = p.movement.gene();
            genes[STEP_START + i] = u8::from(p.step == StepSize::Multiple);
            genes[CAPTURE_START + i] = u8::from(p.capture == Capture::StepOver);
            genes[CONVERSION_START + i] = p.conversion.map_or(0, PieceType::id);
        }
        genes[HONOR_GENE] = self.piece_of_honor.map_or(0, PieceType::id);
        genes[MANDATORY_GENE] = u8::from(self.mandatory_capture);
        Chromosome { genes }
    }
}

/// One validation failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    OutOfRange {
        gene: usize,
        value: u8,
        min: u8,
        max: u8,
    },
    NoPieces,
    TooManyPieces {
        count: usize,
        cap: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange {
                gene,
                value,
                min,
                max,
            } => write!(
                f,
                "gene {gene} = {value}: {} gene out of range {min}-{max}",
                gene_role(gene - 1)
            ),
            Violation::NoPieces => write!(f, "no pieces: genes 1-24 are all zero"),
            Violation::TooManyPieces { count, cap } => {
                write!(f, "too many pieces: {count} placed, cap is {cap}")
            }
        }
    }
}

/// Piece-count ceiling applied by [`Chromosome::validate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PieceCap {
    /// Up to 24 pieces per player, as the gene layout permits.
    #[default]
    Layout,
    /// At most 16 pieces per player.
    Strict,
}

impl PieceCap {
    fn limit(self) -> usize {
        match self {
            PieceCap::Layout => PLACEMENT_CELLS,
            PieceCap::Strict => 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Chromosome {
    genes: [u8; GENE_COUNT],
}

impl Chromosome {
    /// Builds a chromosome without checking gene ranges; see [`Chromosome::validate`].
    pub fn from_genes(genes: [u8; GENE_COUNT]) -> Self {
        Chromosome { genes }
    }

    pub fn genes(&self) -> &[u8; GENE_COUNT] {
        &self.genes
    }

    /// 1-based gene accessor.
    pub fn gene(&self, number: usize) -> u8 {
        self.genes[number - 1]
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        self.validate_with(PieceCap::Layout)
    }

    pub fn validate_with(&self, cap: PieceCap) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        for (i, &g) in self.genes.iter().enumerate() {
            let (min, max) = gene_range(i);
            if g < min || g > max {
                violations.push(Violation::OutOfRange {
                    gene: i + 1,
                    value: g,
                    min,
                    max,
                });
            }
        }
        let placed = self.genes[..PLACEMENT_CELLS]
            .iter()
            .filter(|&&g| g != 0)
            .count();
        if placed == 0 {
            violations.push(Violation::NoPieces);
        } else if placed > cap.limit() {
            violations.push(Violation::TooManyPieces {
                count: placed,
                cap: cap.limit(),
            });
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn decode(&self) -> Result<RuleSet, GenomeError> {
        self.validate().map_err(GenomeError::Invalid)?;
        let g = &self.genes;
        let mut placement = [None; PLACEMENT_CELLS];
        for (cell, &gene) in placement.iter_mut().zip(g.iter()) {
            *cell = PieceType::from_optional_gene(gene);
        }
        let pieces = std::array::from_fn(|i| PieceRules {
            movement: Movement::from_gene(g[MOVEMENT_START + i]).expect("validated"),
            step: if g[STEP_START + i] == 1 {
                StepSize::Multiple
            } else {
                StepSize::Single
            },
            capture: if g[CAPTURE_START + i] == 1 {
                Capture::StepOver
            } else {
                Capture::StepInto
            },
            conversion: PieceType::from_optional_gene(g[CONVERSION_START + i]),
        });
        Ok(RuleSet {
            pieces,
            piece_of_honor: PieceType::from_optional_gene(g[HONOR_GENE]),
            mandatory_capture: g[MANDATORY_GENE] == 1,
            placement,
        })
    }

    /// Every gene uniform over its legal range; the placement block is redrawn
    /// until at least one cell holds a piece.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut genes = [0u8; GENE_COUNT];
        for (i, g) in genes.iter_mut().enumerate() {
            let (min, max) = gene_range(i);
            *g = rng.gen_range(min..=max);
        }
        resample_empty_placement(&mut genes, rng);
        Chromosome { genes }
    }

    /// Resamples each gene independently with probability `rate`.
    pub fn mutate<R: Rng + ?Sized>(&self, rate: f64, rng: &mut R) -> Self {
        let mut genes = self.genes;
        for (i, g) in genes.iter_mut().enumerate() {
            if rng.gen_bool(rate) {
                let (min, max) = gene_range(i);
                *g = rng.gen_range(min..=max);
            }
        }
        resample_empty_placement(&mut genes, rng);
        Chromosome { genes }
    }
}

fn resample_empty_placement<R: Rng + ?Sized>(genes: &mut [u8; GENE_COUNT], rng: &mut R) {
    while genes[..PLACEMENT_CELLS].iter().all(|&g| g == 0) {
        for g in &mut genes[..PLACEMENT_CELLS] {
            *g = rng.gen_range(0..=6);
        }
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.genes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Chromosome {
    type Err = GenomeError;

    /// Parses 50 comma-separated decimal integers. Gene ranges are not checked here.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fields: Vec<&str> = s.trim().split(',').map(str::trim).collect();
        if fields.len() != GENE_COUNT {
            return Err(GenomeError::Parse(format!(
                "expected {GENE_COUNT} genes, found {}",
                fields.len()
            )));
        }
        let mut genes = [0u8; GENE_COUNT];
        for (i, (g, field)) in genes.iter_mut().zip(fields).enumerate() {
            *g = field.parse().map_err(|_| {
                GenomeError::Parse(format!("gene {}: '{field}' is not an integer 0-255", i + 1))
            })?;
        }
        Ok(Chromosome { genes })
    }
}

impl TryFrom<String> for Chromosome {
    type Error = GenomeError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Chromosome> for String {
    fn from(c: Chromosome) -> String {
        c.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn base() -> Chromosome {
        let mut genes = [0u8; GENE_COUNT];
        genes[0] = 1;
        genes[24..30].fill(1);
        Chromosome::from_genes(genes)
    }

    #[test]
    fn movement_gene_order() {
        let expected = [
            Movement::DiagFwd,
            Movement::DiagFwdBack,
            Movement::AllDirs,
            Movement::LShape,
            Movement::StraightFwdBack,
            Movement::StraightFwd,
        ];
        for (gene, m) in (1..=6).zip(expected) {
            assert_eq!(Movement::from_gene(gene), Some(m));
            assert_eq!(m.gene(), gene);
        }
        assert_eq!(Movement::from_gene(0), None);
        assert_eq!(Movement::from_gene(7), None);
    }

    #[test]
    fn all_empty_placement_is_rejected() {
        let mut genes = *base().genes();
        genes[0] = 0;
        let err = Chromosome::from_genes(genes).validate().unwrap_err();
        assert_eq!(err, vec![Violation::NoPieces]);
        assert!(err[0].to_string().contains("no pieces"));
    }

    #[test]
    fn movement_out_of_range_names_gene() {
        let mut genes = *base().genes();
        genes[26] = 7;
        let err = Chromosome::from_genes(genes).validate().unwrap_err();
        assert_eq!(
            err,
            vec![Violation::OutOfRange {
                gene: 27,
                value: 7,
                min: 1,
                max: 6
            }]
        );
        assert_eq!(
            err[0].to_string(),
            "gene 27 = 7: movement gene out of range 1-6"
        );
    }

    #[test]
    fn all_violations_are_reported() {
        let mut genes = [9u8; GENE_COUNT];
        genes[..24].fill(0);
        let err = Chromosome::from_genes(genes).validate().unwrap_err();
        // 26 non-placement genes out of range plus the empty template
        assert_eq!(err.len(), 27);
        assert!(err.contains(&Violation::NoPieces));
    }

    #[test]
    fn strict_cap_limits_to_sixteen() {
        let mut genes = *base().genes();
        genes[..17].fill(2);
        let c = Chromosome::from_genes(genes);
        assert!(c.validate().is_ok());
        assert_eq!(
            c.validate_with(PieceCap::Strict).unwrap_err(),
            vec![Violation::TooManyPieces { count: 17, cap: 16 }]
        );
    }

    #[test]
    fn decode_rejects_invalid() {
        let mut genes = *base().genes();
        genes[49] = 2;
        assert!(matches!(
            Chromosome::from_genes(genes).decode(),
            Err(GenomeError::Invalid(_))
        ));
    }

    #[test]
    fn decode_positions() {
        let mut genes = *base().genes();
        genes[24] = 4;
        genes[30] = 1;
        genes[36] = 1;
        genes[42] = 0;
        genes[43] = 6;
        genes[49] = 1;
        genes[23] = 3;
        let r = Chromosome::from_genes(genes).decode().unwrap();
        let t1 = r.piece(PieceType::new(1).unwrap());
        assert_eq!(t1.movement, Movement::LShape);
        assert_eq!(t1.step, StepSize::Multiple);
        assert_eq!(t1.capture, Capture::StepOver);
        assert_eq!(t1.conversion, PieceType::new(6));
        assert_eq!(r.piece_of_honor, None);
        assert!(r.mandatory_capture);
        assert_eq!(r.placement[0], PieceType::new(1));
        assert_eq!(r.placement[23], PieceType::new(3));
        assert_eq!(r.pieces_per_player(), 2);
    }

    #[test]
    fn text_format() {
        let c = base();
        let line = c.to_string();
        assert_eq!(line.split(',').count(), 50);
        assert!(line.starts_with("1,0,0"));
        assert_eq!(line.parse::<Chromosome>().unwrap(), c);
        assert!("1,2,3".parse::<Chromosome>().is_err());
        let bad = line.replacen('1', "x", 1);
        assert!(bad.parse::<Chromosome>().is_err());
    }

    #[test]
    fn random_is_seed_deterministic_and_valid() {
        let a = Chromosome::random(&mut ChaCha8Rng::seed_from_u64(7));
        let b = Chromosome::random(&mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            assert!(Chromosome::random(&mut rng).validate().is_ok());
        }
    }

    #[test]
    fn mandatory_gene_frequency_is_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let ones = (0..10_000)
            .filter(|_| Chromosome::random(&mut rng).gene(50) == 1)
            .count();
        let freq = ones as f64 / 10_000.0;
        assert!((freq - 0.5).abs() <= 0.05, "frequency {freq}");
    }

    #[test]
    fn zero_rate_mutation_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = Chromosome::random(&mut rng);
        for _ in 0..100 {
            assert_eq!(c.mutate(0.0, &mut rng), c);
        }
    }

    #[test]
    fn full_rate_mutation_changes_expected_fraction() {
        // With every gene redrawn, gene i differs with probability (range_i - 1) / range_i.
        let expected: f64 = (0..GENE_COUNT)
            .map(|i| {
                let (lo, hi) = gene_range(i);
                let n = f64::from(hi - lo + 1);
                (n - 1.0) / n
            })
            .sum::<f64>()
            / GENE_COUNT as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let parent = Chromosome::random(&mut rng);
        let trials = 1000;
        let mut differing = 0usize;
        for _ in 0..trials {
            let child = parent.mutate(1.0, &mut rng);
            differing += parent
                .genes()
                .iter()
                .zip(child.genes())
                .filter(|(a, b)| a != b)
                .count();
        }
        let observed = differing as f64 / (trials * GENE_COUNT) as f64;
        assert!(
            (observed - expected).abs() < 0.01,
            "observed {observed}, expected {expected}"
        );
    }
}
