use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Greedy farthest point sampling. Each step takes the point whose distance
/// to the nearest selected point is largest; ties go to the lowest index.
pub fn fps(points: &[Vec3], k: usize, start_index: usize) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("fps needs at least one point".into()));
    }
    if k > points.len() {
        return Err(Error::InvalidArgument(format!(
            "fps asked for {k} of {} points",
            points.len()
        )));
    }
    if start_index >= points.len() {
        return Err(Error::InvalidArgument(format!(
            "fps start index {start_index} out of range"
        )));
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut selected = Vec::with_capacity(k);
    let mut nearest = vec![f64::INFINITY; points.len()];
    let mut current = start_index;
    nearest[current] = f64::NEG_INFINITY;
    selected.push(current);
    while selected.len() < k {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for (i, p) in points.iter().enumerate() {
            let d = (p - points[current]).norm();
            if d < nearest[i] {
                nearest[i] = d;
            }
            if nearest[i] > best.0 {
                best = (nearest[i], i);
            }
        }
        current = best.1;
        nearest[current] = f64::NEG_INFINITY;
        selected.push(current);
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_corners() {
        let pts = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
        ];
        assert_eq!(fps(&pts, 2, 0).unwrap(), vec![0, 3]);
        // After 0 and 3, points 1 and 2 tie; lowest index first.
        assert_eq!(fps(&pts, 4, 0).unwrap(), vec![0, 3, 1, 2]);
    }

    #[test]
    fn errors() {
        assert!(fps(&[], 0, 0).is_err());
        assert!(fps(&[Vec3::zeros()], 2, 0).is_err());
        assert!(fps(&[Vec3::zeros()], 1, 1).is_err());
        assert!(fps(&[Vec3::zeros()], 0, 0).unwrap().is_empty());
    }

    #[test]
    fn duplicates_are_picked_last() {
        let pts = [Vec3::zeros(), Vec3::zeros(), Vec3::x()];
        assert_eq!(fps(&pts, 3, 0).unwrap(), vec![0, 2, 1]);
    }
}
