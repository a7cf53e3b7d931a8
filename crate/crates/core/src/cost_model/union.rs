use crate::roi_protocol::RoiBox;

/// Number of pixels covered by at least one box.
///
/// Coordinate compression: the distinct box edges split the plane into a
/// grid of cells, and each cell is either fully covered or not.
pub fn union_area(boxes: &[RoiBox]) -> u64 {
    let boxes: Vec<&RoiBox> = boxes.iter().filter(|b| !b.is_empty()).collect();
    if boxes.is_empty() {
        return 0;
    }
    let mut xs: Vec<u64> = boxes.iter().flat_map(|b| [b.x as u64, b.end().0]).collect();
    let mut ys: Vec<u64> = boxes.iter().flat_map(|b| [b.y as u64, b.end().1]).collect();
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();

    let mut area = 0;
    for xw in xs.windows(2) {
        // boxes spanning this column strip
        let mut spans: Vec<(u64, u64)> = boxes
            .iter()
            .filter(|b| b.x as u64 <= xw[0] && b.end().0 >= xw[1])
            .map(|b| (b.y as u64, b.end().1))
            .collect();
        if spans.is_empty() {
            continue;
        }
        spans.sort_unstable();
        let mut covered = 0;
        let (mut lo, mut hi) = spans[0];
        for &(s, e) in &spans[1..] {
            if s > hi {
                covered += hi - lo;
                (lo, hi) = (s, e);
            } else {
                hi = hi.max(e);
            }
        }
        covered += hi - lo;
        area += covered * (xw[1] - xw[0]);
    }
    area
}
