//! Least-squares Power Ratings.
//!
//! Each game says "rating(team1) - rating(team2) should equal the margin
//! team1 would have won by on a neutral field". With more games than teams
//! the system is over-determined; the ratings here minimize the sum of
//! squared residuals over every game, then each connected part of the
//! schedule is shifted so its best team sits at the anchor (99.9).
//!
//! The solver runs damped Jacobi sweeps. Every update in a sweep reads the
//! previous sweep's ratings, so the result does not depend on team order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{schedule_components, Game, SeasonDataset, TeamId, Venue};
use crate::s3s_points::AllocationTable;

pub const DEFAULT_HFA: f64 = 0.73;
pub const DEFAULT_ANCHOR: f64 = 99.9;
pub const DEFAULT_WIN_CONSTANT: f64 = 25.0;

/// Weight given to the fresh per-team mean in each sweep. Plain Jacobi
/// (weight 1) oscillates forever on bipartite schedules such as a single
/// game between two teams.
const SWEEP_DAMPING: f64 = 2.0 / 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HfaMode {
    #[default]
    Fixed,
    /// Re-fit the home-field advantage after every sweep.
    Estimated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Goals credited to the away team. In estimated mode this is the
    /// starting value.
    pub hfa: f64,
    pub hfa_mode: HfaMode,
    /// Raw score differences are clamped to `±margin_cap` before the
    /// venue adjustment.
    pub margin_cap: Option<f64>,
    /// Largest per-team rating change in a sweep that counts as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub anchor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            hfa: DEFAULT_HFA,
            hfa_mode: HfaMode::Fixed,
            margin_cap: None,
            tolerance: 1e-9,
            max_iterations: 10_000,
            anchor: DEFAULT_ANCHOR,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Config(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if let Some(cap) = self.margin_cap {
            if cap.is_nan() || cap < 0.0 {
                return Err(Error::Config(format!("margin cap must be >= 0, got {cap}")));
            }
        }
        if !self.hfa.is_finite() || !self.anchor.is_finite() {
            return Err(Error::Config("hfa and anchor must be finite".into()));
        }
        Ok(())
    }
}

/// Observed score difference from team1's side, clamped to the cap.
fn capped_margin(g: &Game, margin_cap: Option<f64>) -> f64 {
    let raw = f64::from(g.score1) - f64::from(g.score2);
    match margin_cap {
        Some(cap) => raw.clamp(-cap, cap),
        None => raw,
    }
}

/// +1 when team1 was home, -1 when team2 was home, 0 on a neutral field.
fn venue_sign(v: Venue) -> f64 {
    match v {
        Venue::Team1Home => 1.0,
        Venue::Team2Home => -1.0,
        Venue::Neutral => 0.0,
    }
}

fn neutral_margin_with(g: &Game, margin_cap: Option<f64>, hfa: f64) -> f64 {
    capped_margin(g, margin_cap) - venue_sign(g.venue) * hfa
}

/// Margin team1 would be expected to win by on a neutral field: the raw
/// difference, capped, then reduced by `hfa` if team1 was home or raised
/// by `hfa` if team1 was away.
pub fn neutral_margin(g: &Game, cfg: &SolverConfig) -> f64 {
    neutral_margin_with(g, cfg.margin_cap, cfg.hfa)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatingTable {
    pub ratings: BTreeMap<TeamId, f64>,
    /// Index into `components` for each team.
    pub component_of: BTreeMap<TeamId, usize>,
    /// Connected parts of the schedule, largest first. Ratings are only
    /// comparable within one part.
    pub components: Vec<Vec<TeamId>>,
    pub hfa_used: f64,
    pub anchor: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl RatingTable {
    pub fn rating(&self, team: &TeamId) -> Option<f64> {
        self.ratings.get(team).copied()
    }

    pub fn is_disconnected(&self) -> bool {
        self.components.len() > 1
    }

    /// Teams from best to worst; equal ratings fall back to name order.
    pub fn ranked(&self) -> Vec<(TeamId, f64)> {
        let mut rows: Vec<(TeamId, f64)> =
            self.ratings.iter().map(|(t, &r)| (t.clone(), r)).collect();
        rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        rows
    }

    /// Per-game `(PR_1 - PR_2) - neutral margin`, using the hfa the solve
    /// ended with.
    pub fn residuals(&self, ds: &SeasonDataset, margin_cap: Option<f64>) -> Vec<f64> {
        ds.games()
            .iter()
            .map(|g| {
                let r1 = self.ratings[&g.team1];
                let r2 = self.ratings[&g.team2];
                r1 - r2 - neutral_margin_with(g, margin_cap, self.hfa_used)
            })
            .collect()
    }
}

struct Edge {
    a: usize,
    b: usize,
    /// capped raw margin from `a`'s side
    raw: f64,
    sign: f64,
}

/// Solves for least-squares Power Ratings.
pub fn solve_ratings(ds: &SeasonDataset, cfg: &SolverConfig) -> Result<RatingTable> {
    cfg.validate()?;
    let teams = ds.teams();
    if teams.len() < 2 {
        return Err(Error::TooFewTeams(teams.len()));
    }
    let n = teams.len();

    let edges: Vec<Edge> = ds
        .games()
        .iter()
        .map(|g| Edge {
            a: ds.team_index(&g.team1).expect("indexed team"),
            b: ds.team_index(&g.team2).expect("indexed team"),
            raw: capped_margin(g, cfg.margin_cap),
            sign: venue_sign(g.venue),
        })
        .collect();
    let home_games = edges.iter().filter(|e| e.sign != 0.0).count();

    let mut degree = vec![0.0f64; n];
    for e in &edges {
        degree[e.a] += 1.0;
        degree[e.b] += 1.0;
    }

    let mut ratings = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    let mut hfa = cfg.hfa;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iterations {
        iterations += 1;
        next.iter_mut().for_each(|x| *x = 0.0);
        for e in &edges {
            let m = e.raw - e.sign * hfa;
            next[e.a] += ratings[e.b] + m;
            next[e.b] += ratings[e.a] - m;
        }
        let mut max_change = 0.0f64;
        for i in 0..n {
            let mean = next[i] / degree[i];
            let updated = ratings[i] + SWEEP_DAMPING * (mean - ratings[i]);
            max_change = max_change.max((updated - ratings[i]).abs());
            next[i] = updated;
        }
        std::mem::swap(&mut ratings, &mut next);

        if cfg.hfa_mode == HfaMode::Estimated && home_games > 0 {
            // observed home margin minus the rating gap, averaged
            let fitted = edges
                .iter()
                .filter(|e| e.sign != 0.0)
                .map(|e| e.sign * (e.raw - (ratings[e.a] - ratings[e.b])))
                .sum::<f64>()
                / home_games as f64;
            max_change = max_change.max((fitted - hfa).abs());
            hfa = fitted;
        }

        if max_change < cfg.tolerance {
            converged = true;
            break;
        }
    }

    let components = schedule_components(ds);
    let mut component_of = BTreeMap::new();
    for (c, members) in components.iter().enumerate() {
        let idx: Vec<usize> = members
            .iter()
            .map(|t| ds.team_index(t).expect("indexed team"))
            .collect();
        let top = idx
            .iter()
            .map(|&i| ratings[i])
            .fold(f64::NEG_INFINITY, f64::max);
        for (&i, team) in idx.iter().zip(members) {
            ratings[i] = ratings[i] - top + cfg.anchor;
            component_of.insert(team.clone(), c);
        }
    }

    Ok(RatingTable {
        ratings: teams.iter().cloned().zip(ratings).collect(),
        component_of,
        components,
        hfa_used: hfa,
        anchor: cfg.anchor,
        iterations,
        converged,
    })
}

/// Point allocation from solved ratings: a loss to T costs `anchor - PR_T`,
/// a win over T is worth `|anchor - PR_T - win_constant|`.
pub fn allocation_from_ratings(rt: &RatingTable, win_constant: f64) -> AllocationTable {
    AllocationTable::from_ratings(
        rt.ratings.iter().map(|(t, &r)| (t.clone(), r)),
        rt.anchor,
        win_constant,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_dataset;

    fn ds(rows: &str) -> SeasonDataset {
        parse_dataset(format!("game_id,team1,team2,score,home_team\n{rows}").as_bytes()).unwrap()
    }

    fn pr(rt: &RatingTable, name: &str) -> f64 {
        rt.rating(&TeamId::new(name).unwrap()).unwrap()
    }

    #[test]
    fn margin_examples() {
        let cfg = SolverConfig::default();
        let d = ds("1,A,B,10-8,A\n2,A,B,12-12,\n3,A,B,25-8,A\n4,A,B,8-10,B\n");
        assert!((neutral_margin(&d.games()[0], &cfg) - 1.27).abs() < 1e-12);
        assert_eq!(neutral_margin(&d.games()[1], &cfg), 0.0);
        let capped = SolverConfig {
            margin_cap: Some(7.0),
            ..cfg.clone()
        };
        assert!((neutral_margin(&d.games()[2], &capped) - 6.27).abs() < 1e-12);
        // away team credited
        assert!((neutral_margin(&d.games()[3], &cfg) - (-1.27)).abs() < 1e-12);
    }

    #[test]
    fn two_teams_one_game() {
        let rt = solve_ratings(&ds("1,A,B,3-0,\n"), &SolverConfig::default()).unwrap();
        assert!(rt.converged);
        assert_eq!(pr(&rt, "A"), 99.9);
        assert!((pr(&rt, "B") - 96.9).abs() < 1e-9);
    }

    #[test]
    fn consistent_chain() {
        let rt = solve_ratings(
            &ds("1,A,B,2-0,\n2,B,C,2-0,\n3,A,C,4-0,\n"),
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(pr(&rt, "A"), 99.9);
        assert!((pr(&rt, "B") - 97.9).abs() < 1e-9);
        assert!((pr(&rt, "C") - 95.9).abs() < 1e-9);
    }

    #[test]
    fn cycle_gives_equal_ratings() {
        let rt = solve_ratings(
            &ds("1,A,B,3-0,\n2,B,C,3-0,\n3,C,A,3-0,\n"),
            &SolverConfig::default(),
        )
        .unwrap();
        for t in ["A", "B", "C"] {
            assert!((pr(&rt, t) - 99.9).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_all_zero_margins() {
        let rt = solve_ratings(&ds("1,A,B,2-2,\n2,B,C,0-0,\n"), &SolverConfig::default()).unwrap();
        assert!(rt.converged);
        assert!(rt.ratings.values().all(|&r| r == 99.9));
    }

    #[test]
    fn too_few_teams() {
        let empty = ds("");
        assert!(matches!(
            solve_ratings(&empty, &SolverConfig::default()),
            Err(Error::TooFewTeams(0))
        ));
    }

    #[test]
    fn bad_config() {
        let d = ds("1,A,B,3-0,\n");
        for cfg in [
            SolverConfig {
                tolerance: 0.0,
                ..Default::default()
            },
            SolverConfig {
                max_iterations: 0,
                ..Default::default()
            },
            SolverConfig {
                margin_cap: Some(-1.0),
                ..Default::default()
            },
        ] {
            assert!(matches!(solve_ratings(&d, &cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn each_component_is_anchored() {
        let rt = solve_ratings(
            &ds("1,A,B,3-0,\n2,C,D,1-5,\n3,E,C,1-0,\n"),
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(rt.is_disconnected());
        assert_eq!(pr(&rt, "A"), 99.9);
        assert_eq!(pr(&rt, "D"), 99.9);
        assert_ne!(
            rt.component_of[&TeamId::new("A").unwrap()],
            rt.component_of[&TeamId::new("D").unwrap()]
        );
    }

    #[test]
    fn home_advantage_is_removed() {
        // A wins by 4 at home: neutral margin 3.27
        let rt = solve_ratings(&ds("1,A,B,4-0,A\n"), &SolverConfig::default()).unwrap();
        assert!((pr(&rt, "B") - (99.9 - 3.27)).abs() < 1e-9);
    }

    #[test]
    fn estimated_hfa_recovers_true_value() {
        // true gap A-B = 3, home edge = 1
        let d =
            ds("1,A,B,4-0,A\n2,B,A,0-2,B\n3,A,C,6-0,A\n4,C,A,0-4,C\n5,B,C,3-0,B\n6,C,B,0-1,C\n");
        let cfg = SolverConfig {
            hfa_mode: HfaMode::Estimated,
            ..Default::default()
        };
        let rt = solve_ratings(&d, &cfg).unwrap();
        assert!(rt.converged);
        assert!((rt.hfa_used - 1.0).abs() < 1e-7, "{}", rt.hfa_used);
        assert!((pr(&rt, "B") - 96.9).abs() < 1e-7);
        assert!((pr(&rt, "C") - 94.9).abs() < 1e-7);
    }

    #[test]
    fn iteration_limit_reports_not_converged() {
        let d = ds("1,A,B,3-0,\n2,B,C,3-0,\n3,C,D,3-0,\n");
        let cfg = SolverConfig {
            max_iterations: 2,
            ..Default::default()
        };
        let rt = solve_ratings(&d, &cfg).unwrap();
        assert!(!rt.converged);
        assert_eq!(rt.iterations, 2);
    }

    #[test]
    fn allocation_columns() {
        let rt = solve_ratings(&ds("1,A,B,3-0,\n"), &SolverConfig::default()).unwrap();
        let alloc = allocation_from_ratings(&rt, 25.0);
        let a = alloc.get(&TeamId::new("A").unwrap()).unwrap();
        let b = alloc.get(&TeamId::new("B").unwrap()).unwrap();
        assert_eq!((a.loss_cost, a.win_value), (0.0, 25.0));
        assert!((b.loss_cost - 3.0).abs() < 1e-9);
        assert!((b.win_value - 22.0).abs() < 1e-9);
    }
}
