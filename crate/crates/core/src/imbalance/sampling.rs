use rand::seq::SliceRandom;
use rand::Rng;

use crate::datamodel::{Category, Manifest, ManifestRecord, Split};
use crate::error::{Error, Result};
use crate::rng::keyed_rng;

/// Random oversampling: every category present among the training records
/// is topped up to the size of the largest one with copies drawn uniformly,
/// with replacement, from that category.
///
/// Training records are all records outside the validation split. Originals
/// keep their order; copies are appended grouped by category.
pub fn oversample_manifest(manifest: &Manifest, seed: u64) -> Result<Manifest> {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); Category::ALL.len()];
    for (i, r) in manifest.records().iter().enumerate() {
        if r.split != Split::Valid {
            by_class[r.label.index()].push(i);
        }
    }
    let majority = by_class.iter().map(Vec::len).max().unwrap_or(0);
    if majority == 0 {
        return Err(Error::Empty("manifest has no training records"));
    }
    let mut records: Vec<ManifestRecord> = manifest.records().to_vec();
    for (class, members) in by_class.iter().enumerate() {
        if members.is_empty() || members.len() == majority {
            continue;
        }
        let mut rng = keyed_rng(seed, &format!("oversample/{}", Category::ALL[class]));
        for _ in members.len()..majority {
            let pick = members[rng.gen_range(0..members.len())];
            records.push(manifest.records()[pick].clone());
        }
    }
    Ok(Manifest::from_records_unchecked(records))
}

/// Validation size for one category: `round(fraction * n)`, halves rounded up.
pub fn validation_count(n: usize, fraction: f64) -> usize {
    (n as f64 * fraction).round() as usize
}

/// Stratified train/validation split. Within each category a seeded shuffle
/// picks `round(fraction * n_c)` records for validation; the rest become
/// training records. Record order is preserved.
pub fn split_manifest(manifest: &Manifest, valid_fraction: f64, seed: u64) -> Result<Manifest> {
    if !(valid_fraction > 0.0 && valid_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "validation fraction must lie in (0, 1), got {valid_fraction}"
        )));
    }
    if manifest.is_empty() {
        return Err(Error::Empty("manifest"));
    }
    let mut records: Vec<ManifestRecord> = manifest.records().to_vec();
    for r in &mut records {
        r.split = Split::Train;
    }
    for category in Category::ALL {
        let mut members: Vec<usize> = (0..records.len()).filter(|&i| records[i].label == category).collect();
        if members.is_empty() {
            continue;
        }
        let mut rng = keyed_rng(seed, &format!("split/{category}"));
        members.shuffle(&mut rng);
        for &i in &members[..validation_count(members.len(), valid_fraction)] {
            records[i].split = Split::Valid;
        }
    }
    Manifest::new(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(labels: &[Category]) -> Manifest {
        Manifest::new(
            labels
                .iter()
                .enumerate()
                .map(|(i, l)| ManifestRecord::new(format!("img_{i}.png"), "test", *l))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn oversample_three_to_one() {
        use Category::*;
        let m = manifest(&[Mel, Mel, Mel, Nv]);
        let out = oversample_manifest(&m, 9).unwrap();
        let counts = out.class_counts(None);
        assert_eq!((counts.get(Mel), counts.get(Nv)), (3, 3));
        assert_eq!(out.records().iter().filter(|r| r.path == "img_3.png").count(), 3);
        assert_eq!(&out.records()[..4], m.records());
    }

    #[test]
    fn oversample_balanced_is_copy() {
        use Category::*;
        let m = manifest(&[Mel, Nv, Bcc]);
        assert_eq!(oversample_manifest(&m, 1).unwrap(), m);
    }

    #[test]
    fn oversample_deterministic_and_skips_validation() {
        use Category::*;
        let mut recs = manifest(&[Mel, Mel, Mel, Mel, Nv, Nv, Df]).into_records();
        recs[4].split = Split::Valid;
        let m = Manifest::new(recs).unwrap();
        let a = oversample_manifest(&m, 5).unwrap();
        assert_eq!(a, oversample_manifest(&m, 5).unwrap());
        assert!(a.records()[7..].iter().all(|r| r.path != "img_4.png"));
        let train = a.class_counts(None);
        assert_eq!((train.get(Mel), train.get(Nv), train.get(Df)), (4, 5, 4));
        // copies re-read as a valid manifest
        let mut buf = Vec::new();
        crate::datamodel::write_manifest_to(&a, &mut buf).unwrap();
        assert_eq!(crate::datamodel::read_manifest(buf.as_slice()).unwrap(), a);
    }

    #[test]
    fn oversample_empty_fails() {
        assert!(oversample_manifest(&Manifest::default(), 0).is_err());
    }

    #[test]
    fn split_single_class() {
        let m = manifest(&[Category::Bkl; 10]);
        let s = split_manifest(&m, 0.1, 3).unwrap();
        assert_eq!(s.split_sizes(), (9, 1, 0));
        assert_eq!(s, split_manifest(&m, 0.1, 3).unwrap());
        let paths: Vec<_> = s.records().iter().map(|r| &r.path).collect();
        let orig: Vec<_> = m.records().iter().map(|r| &r.path).collect();
        assert_eq!(paths, orig);
    }

    #[test]
    fn split_seed_changes_assignment() {
        let m = manifest(&[Category::Nv; 200]);
        let a = split_manifest(&m, 0.1, 1).unwrap();
        let b = split_manifest(&m, 0.1, 2).unwrap();
        assert_eq!(a.split_sizes(), b.split_sizes());
        assert_ne!(a, b);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let m = manifest(&[Category::Nv; 3]);
        assert!(split_manifest(&m, 0.0, 0).is_err());
        assert!(split_manifest(&m, 1.0, 0).is_err());
        assert!(split_manifest(&Manifest::default(), 0.1, 0).is_err());
    }
}
