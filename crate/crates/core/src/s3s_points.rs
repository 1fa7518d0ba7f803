//! Quality-win points: each win earns the opponent's win value, each loss
//! costs the opponent's loss cost, and the venue shifts every line by the
//! home-field advantage (home teams give it back, away teams gain it).
//! Season totals are scaled to a 16-game schedule.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{SeasonDataset, TeamId};

/// Games in a typical regular season; totals are normalized to this.
pub const NORMALIZED_GAMES: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AllocationEntry {
    pub pr: f64,
    /// Points deducted for losing to this team.
    pub loss_cost: f64,
    /// Points earned for beating this team.
    pub win_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AllocationTable {
    pub entries: BTreeMap<TeamId, AllocationEntry>,
    pub anchor: f64,
    pub win_constant: f64,
}

impl AllocationTable {
    pub fn from_ratings(
        ratings: impl IntoIterator<Item = (TeamId, f64)>,
        anchor: f64,
        win_constant: f64,
    ) -> Self {
        let entries = ratings
            .into_iter()
            .map(|(team, pr)| {
                let loss_cost = anchor - pr;
                let win_value = (loss_cost - win_constant).abs();
                (
                    team,
                    AllocationEntry {
                        pr,
                        loss_cost,
                        win_value,
                    },
                )
            })
            .collect();
        AllocationTable {
            entries,
            anchor,
            win_constant,
        }
    }

    pub fn get(&self, team: &TeamId) -> Option<&AllocationEntry> {
        self.entries.get(team)
    }

    /// Teams rated more than `win_constant` below the anchor. Past that
    /// point the absolute value makes beating a weaker team worth more.
    pub fn beyond_kink(&self) -> Vec<TeamId> {
        self.entries
            .iter()
            .filter(|(_, e)| e.loss_cost > self.win_constant)
            .map(|(t, _)| t.clone())
            .collect()
    }

    /// Rows from best to worst rating.
    pub fn ranked(&self) -> Vec<(&TeamId, &AllocationEntry)> {
        let mut rows: Vec<_> = self.entries.iter().collect();
        rows.sort_by(|a, b| b.1.pr.total_cmp(&a.1.pr).then_with(|| a.0.cmp(b.0)));
        rows
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Win,
    Loss,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TallyLine {
    pub game_id: u64,
    pub opponent: TeamId,
    pub goals_for: u32,
    pub goals_against: u32,
    pub outcome: Outcome,
    pub wl_points: f64,
    pub hfa_adjust: f64,
    pub line_total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeasonTally {
    pub team: TeamId,
    pub lines: Vec<TallyLine>,
    pub raw_total: f64,
    pub games_played: usize,
    pub normalized_total: f64,
}

/// Scales a raw season total to a 16-game season.
pub fn normalize(raw_total: f64, games_played: usize) -> Result<f64> {
    if games_played == 0 {
        return Err(Error::NoGames);
    }
    Ok(raw_total * NORMALIZED_GAMES / games_played as f64)
}

/// One line per game `team` played, in dataset order.
pub fn tally_team(
    team: &TeamId,
    ds: &SeasonDataset,
    alloc: &AllocationTable,
    hfa: f64,
) -> Result<SeasonTally> {
    let team = ds
        .find_team(team.name())
        .ok_or_else(|| Error::UnknownTeam(team.to_string()))?;

    let mut lines = Vec::new();
    for game in ds.games_of(team) {
        if game.is_tie() {
            return Err(Error::TiedGame {
                game_id: game.game_id,
                team1: game.team1.to_string(),
                team2: game.team2.to_string(),
            });
        }
        let opponent = game.opponent_of(team).expect("game involves team");
        let entry = alloc
            .get(opponent)
            .ok_or_else(|| Error::MissingAllocation {
                team: team.to_string(),
                opponent: opponent.to_string(),
            })?;
        let (goals_for, goals_against) = game.scores_for(team).expect("game involves team");
        let (outcome, wl_points) = if goals_for > goals_against {
            (Outcome::Win, entry.win_value)
        } else {
            (Outcome::Loss, -entry.loss_cost)
        };
        let hfa_adjust = match game.home_team() {
            Some(home) if home == team => -hfa,
            Some(_) => hfa,
            None => 0.0,
        };
        lines.push(TallyLine {
            game_id: game.game_id,
            opponent: opponent.clone(),
            goals_for,
            goals_against,
            outcome,
            wl_points,
            hfa_adjust,
            line_total: wl_points + hfa_adjust,
        });
    }

    let raw_total: f64 = lines.iter().map(|l| l.line_total).sum();
    let games_played = lines.len();
    Ok(SeasonTally {
        team: team.clone(),
        lines,
        raw_total,
        games_played,
        normalized_total: normalize(raw_total, games_played)?,
    })
}

pub fn tally_all(
    ds: &SeasonDataset,
    alloc: &AllocationTable,
    hfa: f64,
) -> Result<BTreeMap<TeamId, SeasonTally>> {
    ds.teams()
        .iter()
        .map(|t| Ok((t.clone(), tally_team(t, ds, alloc, hfa)?)))
        .collect()
}
