//! The agaricus-lepiota CSV: one class letter followed by 22 categorical letters.

use std::collections::BTreeSet;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::LabeledSample;
use crate::error::{Error, Result};
use crate::rng::seeded;

pub const ATTRIBUTES: usize = 22;

/// Parses the CSV text. Each attribute becomes its alphabetical index within
/// the categories observed in that column, divided by `count - 1` (0 for a
/// single-category column). `?` is an ordinary category.
pub fn parse_mushroom(text: &str, path: &Path) -> Result<Vec<LabeledSample>> {
    let fail = |line: usize, message: String| Error::CsvFormat {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rows: Vec<(usize, Vec<char>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != ATTRIBUTES + 1 {
            return Err(fail(
                line,
                format!("expected {} fields, found {}", ATTRIBUTES + 1, fields.len()),
            ));
        }
        let mut letters = Vec::with_capacity(fields.len());
        for (col, field) in fields.iter().enumerate() {
            let mut chars = field.trim().chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => letters.push(c),
                _ => {
                    return Err(fail(
                        line,
                        format!("field {} is not a single letter: {field:?}", col + 1),
                    ))
                }
            }
        }
        let label = match letters[0] {
            'e' => 0,
            'p' => 1,
            other => return Err(fail(line, format!("unknown class {other:?}"))),
        };
        rows.push((label, letters));
    }

    let categories: Vec<Vec<char>> = (1..=ATTRIBUTES)
        .map(|col| {
            rows.iter()
                .map(|(_, l)| l[col])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();

    Ok(rows
        .into_iter()
        .map(|(label, letters)| {
            let features = categories
                .iter()
                .enumerate()
                .map(|(j, cats)| {
                    let idx = cats
                        .binary_search(&letters[j + 1])
                        .expect("observed category");
                    if cats.len() > 1 {
                        idx as f64 / (cats.len() - 1) as f64
                    } else {
                        0.0
                    }
                })
                .collect();
            LabeledSample { features, label }
        })
        .collect())
}

pub fn load_mushroom_csv(path: impl AsRef<Path>) -> Result<Vec<LabeledSample>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mushroom(&text, path)
}

/// Category letters of each attribute column of the public dataset.
const ALPHABETS: [&str; ATTRIBUTES] = [
    "bcxfks",
    "fgys",
    "nbcgrpuewy",
    "tf",
    "alcyfmnps",
    "af",
    "cw",
    "bn",
    "knbhgropuewy",
    "et",
    "bcer?",
    "fyks",
    "fyks",
    "nbcgopewy",
    "nbcgopewy",
    "p",
    "nowy",
    "not",
    "eflnp",
    "knbhrouwy",
    "acnsvy",
    "glmpuwd",
];

const ODOR: usize = 4;
const SPORE_PRINT: usize = 19;

/// Odor letters with their approximate class-conditional frequencies in the
/// public file: (letter, edible weight, poisonous weight).
const ODOR_PROFILE: [(char, f64, f64); 9] = [
    ('a', 400.0, 0.0),
    ('l', 400.0, 0.0),
    ('n', 3408.0, 120.0),
    ('c', 0.0, 192.0),
    ('f', 0.0, 2160.0),
    ('m', 0.0, 36.0),
    ('p', 0.0, 256.0),
    ('s', 0.0, 576.0),
    ('y', 0.0, 576.0),
];

/// Fixed seed of the surrogate's per-column category distributions.
const PROFILE_SEED: u64 = 0x6167_6172;

/// Stand-in for the public file when it is unavailable: `n` rows with the
/// same format, alphabets and class balance. The class is drawn first and
/// every attribute from a class-conditional categorical distribution; odor
/// follows the public file's frequencies, the other columns use fixed random
/// profiles, so several attributes carry label information. As in the public
/// file, the classes are separable: a row is poisonous exactly when its odor
/// is not almond, anise or none, or its spore print is green.
pub fn surrogate_csv(n: usize, seed: u64) -> String {
    let mut profile_rng = seeded(PROFILE_SEED);
    // profiles[col][class] over that column's alphabet
    let profiles: Vec<[WeightedIndex<f64>; 2]> = ALPHABETS
        .iter()
        .enumerate()
        .map(|(col, alpha)| {
            let mut class_profile = |class: usize| {
                let weights: Vec<f64> = if col == ODOR {
                    alpha
                        .chars()
                        .map(|c| {
                            let &(_, e, p) = ODOR_PROFILE
                                .iter()
                                .find(|(l, _, _)| *l == c)
                                .expect("odor letter");
                            if class == 0 {
                                e
                            } else {
                                p
                            }
                        })
                        .collect()
                } else {
                    // cubing concentrates each profile on a few categories
                    alpha
                        .chars()
                        .map(|c| {
                            let w = profile_rng.random::<f64>().powi(3) + 1e-3;
                            // green spore prints are reserved for poisonous odorless rows
                            if col == SPORE_PRINT && c == 'r' {
                                0.0
                            } else {
                                w
                            }
                        })
                        .collect()
                };
                WeightedIndex::new(weights).expect("positive weights")
            };
            [class_profile(0), class_profile(1)]
        })
        .collect();

    let alphabets: Vec<Vec<char>> = ALPHABETS.iter().map(|a| a.chars().collect()).collect();
    let mut rng = seeded(seed);
    let mut out = String::with_capacity(n * 46);
    for _ in 0..n {
        let class = usize::from(rng.random_bool(3916.0 / 8124.0));
        out.push(if class == 1 { 'p' } else { 'e' });
        let mut letters: Vec<char> = alphabets
            .iter()
            .zip(&profiles)
            .map(|(alpha, profile)| alpha[profile[class].sample(&mut rng)])
            .collect();
        if class == 1 && letters[ODOR] == 'n' {
            letters[SPORE_PRINT] = 'r';
        }
        for c in letters {
            out.push(',');
            out.push(c);
        }
        out.push('\n');
    }
    out
}
