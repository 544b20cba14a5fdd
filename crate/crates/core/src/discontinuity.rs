//! Blocked-span extraction along a desired path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shot::{GlobalPath, Pose4};
use crate::world::{is_free, QuadModel, World};

pub const DEFAULT_MARGIN: usize = 2;

/// A blocked section of a path, bracketed by collision-free entry and exit
/// samples where a local plan attaches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discontinuity {
    pub entry_index: usize,
    pub exit_index: usize,
    pub entry_pose: Pose4,
    pub exit_pose: Pose4,
    /// Maximal runs of colliding samples covered by this span, as inclusive
    /// `(first, last)` index pairs in ascending order. Holds more than one run
    /// when padded spans were merged.
    pub blocked_runs: Vec<(usize, usize)>,
}

impl Discontinuity {
    /// Inclusive index range from the first to the last blocked sample.
    pub fn blocked_range(&self) -> (usize, usize) {
        let first = self.blocked_runs.first().map_or(self.entry_index + 1, |r| r.0);
        let last = self.blocked_runs.last().map_or(self.exit_index - 1, |r| r.1);
        (first, last)
    }
}

/// Maximal runs of consecutive `true` entries, as inclusive index pairs.
pub(crate) fn runs(flags: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &hit) in flags.iter().enumerate() {
        match (hit, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, flags.len() - 1));
    }
    out
}

/// Scans every path sample and returns the padded, merged blocked spans in
/// path order.
pub fn find_discontinuities(
    path: &GlobalPath,
    w: &World,
    q: &QuadModel,
    margin: usize,
) -> Result<Vec<Discontinuity>> {
    if margin == 0 {
        return Err(Error::InvalidInput("discontinuity margin must be at least 1".into()));
    }
    let n = path.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let blocked: Vec<bool> = path.positions().map(|p| !is_free(w, q, p)).collect();
    if blocked[0] {
        return Err(Error::EndpointBlocked { index: 0 });
    }
    if blocked[n - 1] {
        return Err(Error::EndpointBlocked { index: n - 1 });
    }

    let mut spans: Vec<Discontinuity> = Vec::new();
    for (first, last) in runs(&blocked) {
        let mut entry = first.saturating_sub(margin);
        while blocked[entry] {
            entry = entry
                .checked_sub(1)
                .ok_or(Error::UnresolvableSpan { first, last })?;
        }
        let mut exit = (last + margin).min(n - 1);
        while blocked[exit] {
            exit += 1;
            if exit == n {
                return Err(Error::UnresolvableSpan { first, last });
            }
        }
        match spans.last_mut() {
            Some(prev) if entry <= prev.exit_index => {
                prev.exit_index = prev.exit_index.max(exit);
                prev.exit_pose = path.poses[prev.exit_index];
                prev.blocked_runs.push((first, last));
            }
            _ => spans.push(Discontinuity {
                entry_index: entry,
                exit_index: exit,
                entry_pose: path.poses[entry],
                exit_pose: path.poses[exit],
                blocked_runs: vec![(first, last)],
            }),
        }
    }
    Ok(spans)
}
