//! Ratings Percentage Index and the experiments that expose its quirks:
//! schedule replacement ("ACC-ification") and single-game result flips.
//!
//! A team's opponents' win proportion leaves out the games those opponents
//! played against the team itself. A proportion over zero games is 0.5.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{Game, SeasonDataset, TeamId};
use crate::power_rating::{solve_ratings, SolverConfig};

/// Win proportion reported when there are no games to count.
pub const EMPTY_RECORD_WP: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RpiWeights {
    pub wp: f64,
    pub owp: f64,
    pub oowp: f64,
}

impl Default for RpiWeights {
    fn default() -> Self {
        RpiWeights {
            wp: 0.25,
            owp: 0.50,
            oowp: 0.25,
        }
    }
}

impl RpiWeights {
    pub fn new(wp: f64, owp: f64, oowp: f64) -> Result<Self> {
        let w = RpiWeights { wp, owp, oowp };
        if [wp, owp, oowp].iter().any(|x| x.is_nan() || *x < 0.0)
            || ((wp + owp + oowp) - 1.0).abs() > 1e-9
        {
            return Err(Error::Config(format!(
                "RPI weights must be non-negative and sum to 1, got {wp},{owp},{oowp}"
            )));
        }
        Ok(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RpiRow {
    pub wins: u32,
    pub losses: u32,
    pub ties: u32,
    pub wp: f64,
    pub owp: f64,
    pub oowp: f64,
    pub rpi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RpiTable {
    pub rows: BTreeMap<TeamId, RpiRow>,
    pub weights: RpiWeights,
}

impl RpiTable {
    pub fn get(&self, team: &TeamId) -> Option<&RpiRow> {
        self.rows.get(team)
    }

    /// Highest RPI first; equal values fall back to name order.
    pub fn ranked(&self) -> Vec<(&TeamId, &RpiRow)> {
        let mut rows: Vec<_> = self.rows.iter().collect();
        rows.sort_by(|a, b| b.1.rpi.total_cmp(&a.1.rpi).then_with(|| a.0.cmp(b.0)));
        rows
    }

    pub fn rank_of(&self, team: &TeamId) -> Option<usize> {
        self.ranked()
            .iter()
            .position(|(t, _)| *t == team)
            .map(|i| i + 1)
    }
}

#[derive(Clone, Copy, Default)]
struct Tally {
    wins: f64,
    games: f64,
}

impl Tally {
    fn add(&mut self, g: &Game, team: &TeamId) {
        self.games += 1.0;
        self.wins += match g.winner() {
            Some(w) if w == team => 1.0,
            Some(_) => 0.0,
            None => 0.5,
        };
    }

    fn minus(self, other: Tally) -> Tally {
        Tally {
            wins: self.wins - other.wins,
            games: self.games - other.games,
        }
    }

    fn proportion(self) -> f64 {
        if self.games == 0.0 {
            EMPTY_RECORD_WP
        } else {
            self.wins / self.games
        }
    }
}

pub fn compute_rpi(ds: &SeasonDataset, weights: RpiWeights) -> Result<RpiTable> {
    let mut overall: HashMap<&TeamId, Tally> = HashMap::new();
    // (team, opponent) -> team's results in their meetings
    let mut mutual: HashMap<(&TeamId, &TeamId), Tally> = HashMap::new();
    for g in ds.games() {
        for (me, opp) in [(&g.team1, &g.team2), (&g.team2, &g.team1)] {
            overall.entry(me).or_default().add(g, me);
            mutual.entry((me, opp)).or_default().add(g, me);
        }
    }

    let owp_of = |team: &TeamId| -> Result<f64> {
        let mut sum = 0.0;
        let mut n = 0usize;
        for g in ds.games_of(team) {
            let opp = g.opponent_of(team).expect("game involves team");
            sum += overall[opp].minus(mutual[&(opp, team)]).proportion();
            n += 1;
        }
        if n == 0 {
            return Err(Error::TeamWithoutGames(team.to_string()));
        }
        Ok(sum / n as f64)
    };

    let mut owp = HashMap::new();
    for team in ds.teams() {
        owp.insert(team, owp_of(team)?);
    }

    let mut rows = BTreeMap::new();
    for team in ds.teams() {
        let tally = overall[team];
        let games: Vec<&Game> = ds.games_of(team).collect();
        let oowp = games
            .iter()
            .map(|g| owp[g.opponent_of(team).expect("game involves team")])
            .sum::<f64>()
            / games.len() as f64;
        let (wins, losses, ties) = ds.record(team);
        let wp = tally.proportion();
        let team_owp = owp[team];
        rows.insert(
            team.clone(),
            RpiRow {
                wins,
                losses,
                ties,
                wp,
                owp: team_owp,
                oowp,
                rpi: weights.wp * wp + weights.owp * team_owp + weights.oowp * oowp,
            },
        );
    }
    Ok(RpiTable { rows, weights })
}

/// Gives `target` a new schedule: its k-th game (in dataset order) is
/// played against `replacements[k]` instead, with the same score and
/// venue roles. Other games are untouched.
pub fn acc_ify(
    ds: &SeasonDataset,
    target: &TeamId,
    replacements: &[TeamId],
) -> Result<SeasonDataset> {
    let target = ds
        .find_team(target.name())
        .ok_or_else(|| Error::UnknownTeam(target.to_string()))?
        .clone();
    let count = ds.games_of(&target).count();
    if count != replacements.len() {
        return Err(Error::ReplacementLength {
            team: target.to_string(),
            games: count,
            replacements: replacements.len(),
        });
    }
    for r in replacements {
        if !ds.contains_team(r) {
            return Err(Error::UnknownTeam(r.to_string()));
        }
    }

    let mut next = replacements.iter();
    let games = ds
        .games()
        .iter()
        .map(|g| {
            let mut g = g.clone();
            if g.team1 == target {
                g.team2 = next.next().expect("length checked").clone();
            } else if g.team2 == target {
                g.team1 = next.next().expect("length checked").clone();
            }
            g
        })
        .collect();
    SeasonDataset::new(games)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Rpi(RpiWeights),
    Power(SolverConfig),
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Rpi(_) => "rpi",
            Method::Power(_) => "power",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedValue {
    pub rank: usize,
    pub team: TeamId,
    pub value: f64,
}

/// Full ranking under `method`, best first.
pub fn ranked_values(ds: &SeasonDataset, method: &Method) -> Result<Vec<RankedValue>> {
    let pairs: Vec<(TeamId, f64)> = match method {
        Method::Rpi(w) => compute_rpi(ds, *w)?
            .ranked()
            .into_iter()
            .map(|(t, r)| (t.clone(), r.rpi))
            .collect(),
        Method::Power(cfg) => solve_ratings(ds, cfg)?.ranked(),
    };
    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(i, (team, value))| RankedValue {
            rank: i + 1,
            team,
            value,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankDelta {
    pub team: TeamId,
    pub rank_before: usize,
    pub rank_after: usize,
    pub moved: bool,
}

/// Before/after rankings side by side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub method: &'static str,
    pub before: Vec<RankedValue>,
    pub after: Vec<RankedValue>,
    /// One per team, ordered by `rank_before`.
    pub deltas: Vec<RankDelta>,
}

impl Comparison {
    pub fn new(method: &Method, before: Vec<RankedValue>, after: Vec<RankedValue>) -> Self {
        let after_rank: HashMap<&TeamId, usize> = after.iter().map(|r| (&r.team, r.rank)).collect();
        let deltas = before
            .iter()
            .map(|b| {
                let rank_after = after_rank.get(&b.team).copied().unwrap_or(0);
                RankDelta {
                    team: b.team.clone(),
                    rank_before: b.rank,
                    rank_after,
                    moved: rank_after != b.rank,
                }
            })
            .collect();
        Comparison {
            method: method.name(),
            before,
            after,
            deltas,
        }
    }

    pub fn moved_count(&self) -> usize {
        self.deltas.iter().filter(|d| d.moved).count()
    }
}

/// Reverses one game's result and ranks the season before and after.
pub fn compare_after_flip(ds: &SeasonDataset, game_id: u64, method: &Method) -> Result<Comparison> {
    let flipped = ds.with_game_mapped(game_id, Game::reversed_result)?;
    let before = ranked_values(ds, method)?;
    let after = ranked_values(&flipped, method)?;
    Ok(Comparison::new(method, before, after))
}

pub fn perturb_and_compare(
    ds: &SeasonDataset,
    game_id: u64,
    method: &Method,
) -> Result<Vec<RankDelta>> {
    Ok(compare_after_flip(ds, game_id, method)?.deltas)
}
