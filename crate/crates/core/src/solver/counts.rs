//! Which container counts a set of platforms can hold, ignoring weights.

use std::collections::BTreeSet;

use crate::fleet::{ContainerLength, PlatformType};

/// Platforms differ, as far as counts go, only in their length and in
/// whether the top slot takes a 53 ft container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlatformKind {
    Forty,
    FortyTop53,
    FiftyThree,
    FiftyThreeTop53,
}

impl PlatformKind {
    pub fn of(p: &PlatformType) -> Self {
        match (p.length, p.top_53_capable) {
            (ContainerLength::L40, false) => PlatformKind::Forty,
            (ContainerLength::L40, true) => PlatformKind::FortyTop53,
            (ContainerLength::L53, false) => PlatformKind::FiftyThree,
            (ContainerLength::L53, true) => PlatformKind::FiftyThreeTop53,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Number of platforms of each kind.
pub type PlatformKinds = [u32; 4];

/// Whether platforms in the given kind counts can hold exactly `n40` 40 ft
/// and `n53` 53 ft containers.
///
/// 53 ft containers go first to 53 ft bottoms and to both slots of fully
/// 53-capable platforms; any overflow must ride on top of a 40 ft container
/// on a 40 ft platform with a 53-capable top. 40 ft containers fit any
/// remaining slot.
pub fn count_feasible(kinds: &PlatformKinds, n40: u32, n53: u32) -> bool {
    let [a, b, c, d] = *kinds;
    let overflow = n53.saturating_sub(c + 2 * d);
    overflow <= b.min(n40) && n40 + n53 <= 2 * (a + b + c + d)
}

/// Reference for [`count_feasible`]: reachable count pairs built one
/// platform at a time from each kind's pattern contents.
pub fn count_feasible_dp(kinds: &PlatformKinds, n40: u32, n53: u32) -> bool {
    let contents: [&[(u32, u32)]; 4] = [
        &[(0, 0), (1, 0), (2, 0)],
        &[(0, 0), (1, 0), (2, 0), (1, 1)],
        &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1)],
        &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)],
    ];
    let mut reach: BTreeSet<(u32, u32)> = BTreeSet::from([(0, 0)]);
    for (k, &count) in kinds.iter().enumerate() {
        for _ in 0..count {
            let mut next = BTreeSet::new();
            for &(x, y) in &reach {
                for &(dx, dy) in contents[k] {
                    next.insert((x + dx, y + dy));
                }
            }
            reach = next;
        }
    }
    reach.contains(&(n40, n53))
}
