//! Final ordering: sort by normalized points, then one top-down pass over
//! adjacent pairs that swaps any pair where the lower team won more of
//! their meetings.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ingest::{SeasonDataset, TeamId};
use crate::s3s_points::SeasonTally;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankEntry {
    pub rank: usize,
    pub team: TeamId,
    pub wins: u32,
    pub losses: u32,
    pub s3s_points: f64,
    /// Position by points alone, before the head-to-head pass.
    pub pre_swap_rank: usize,
}

/// One exchange made by the head-to-head pass. `team_a` held `rank_a`
/// before the swap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Swap {
    pub rank_a: usize,
    pub rank_b: usize,
    pub team_a: TeamId,
    pub team_b: TeamId,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankingList {
    pub entries: Vec<RankEntry>,
    pub swaps_applied: Vec<Swap>,
}

/// Wins for `a` and for `b` over every game between them.
pub fn head_to_head(a: &TeamId, b: &TeamId, ds: &SeasonDataset) -> (u32, u32) {
    let mut wins = (0, 0);
    for g in ds.games_of(a).filter(|g| g.involves(b)) {
        match g.winner() {
            Some(w) if w == a => wins.0 += 1,
            Some(_) => wins.1 += 1,
            None => {}
        }
    }
    wins
}

/// Orders teams by normalized points and applies the single swap pass.
///
/// Exact point ties are broken by head-to-head wins among the tied teams
/// (for a pair, simply who won more meetings), then by raw total, then by
/// name.
pub fn rank(tallies: &BTreeMap<TeamId, SeasonTally>, ds: &SeasonDataset) -> RankingList {
    let mut order: Vec<&SeasonTally> = tallies.values().collect();
    order.sort_by(|a, b| b.normalized_total.total_cmp(&a.normalized_total));

    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && order[end].normalized_total == order[start].normalized_total {
            end += 1;
        }
        if end - start > 1 {
            let group: Vec<TeamId> = order[start..end].iter().map(|t| t.team.clone()).collect();
            let group_wins = |team: &TeamId| -> u32 {
                group
                    .iter()
                    .filter(|other| *other != team)
                    .map(|other| head_to_head(team, other, ds).0)
                    .sum()
            };
            order[start..end].sort_by(|a, b| {
                group_wins(&b.team)
                    .cmp(&group_wins(&a.team))
                    .then_with(|| b.raw_total.total_cmp(&a.raw_total))
                    .then_with(|| a.team.cmp(&b.team))
            });
        }
        start = end;
    }

    let pre_swap_rank: BTreeMap<&TeamId, usize> = order
        .iter()
        .enumerate()
        .map(|(i, t)| (&t.team, i + 1))
        .collect();

    let mut swaps_applied = Vec::new();
    for i in 0..order.len().saturating_sub(1) {
        let (upper, lower) = (&order[i].team, &order[i + 1].team);
        let (upper_wins, lower_wins) = head_to_head(upper, lower, ds);
        if lower_wins > upper_wins {
            swaps_applied.push(Swap {
                rank_a: i + 1,
                rank_b: i + 2,
                team_a: upper.clone(),
                team_b: lower.clone(),
            });
            order.swap(i, i + 1);
        }
    }

    let entries = order
        .iter()
        .enumerate()
        .map(|(i, tally)| {
            let (wins, losses, _) = ds.record(&tally.team);
            RankEntry {
                rank: i + 1,
                team: tally.team.clone(),
                wins,
                losses,
                s3s_points: tally.normalized_total,
                pre_swap_rank: pre_swap_rank[&tally.team],
            }
        })
        .collect();

    RankingList {
        entries,
        swaps_applied,
    }
}
