//! Shared test support: an independent dense least-squares solve and
//! random season generators.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use s3s::{schedule_components, Game, SeasonDataset, TeamId, Venue};

pub const NAMES: [&str; 10] = [
    "Army",
    "Brown",
    "Cornell",
    "Duke",
    "Fairfield",
    "Harvard",
    "Lehigh",
    "Navy",
    "Penn",
    "Yale",
];

pub fn team(name: &str) -> TeamId {
    TeamId::new(name).unwrap()
}

/// `(team1 index, team2 index, score1, score2, venue code)`; venue 0 is
/// neutral, 1 team1 home, 2 team2 home. Self-pairings are redirected to
/// the next team.
pub fn season_from(rows: &[(usize, usize, u32, u32, u8)], n_teams: usize) -> SeasonDataset {
    let games = rows
        .iter()
        .enumerate()
        .map(|(i, &(a, b, s1, s2, v))| {
            let a = a % n_teams;
            let mut b = b % n_teams;
            if a == b {
                b = (b + 1) % n_teams;
            }
            Game {
                game_id: i as u64 + 1,
                team1: team(NAMES[a]),
                team2: team(NAMES[b]),
                score1: s1,
                score2: s2,
                venue: match v % 3 {
                    0 => Venue::Neutral,
                    1 => Venue::Team1Home,
                    _ => Venue::Team2Home,
                },
            }
        })
        .collect();
    SeasonDataset::new(games).unwrap()
}

/// Random season with `teams` teams and `games` games. With `no_ties`
/// every game has a winner.
pub fn random_season(
    rng: &mut ChaCha8Rng,
    teams: usize,
    games: usize,
    no_ties: bool,
) -> SeasonDataset {
    let rows: Vec<_> = (0..games)
        .map(|_| {
            let a = rng.random_range(0..teams);
            let b = rng.random_range(0..teams);
            let s1 = rng.random_range(0..20u32);
            let mut s2 = rng.random_range(0..20u32);
            if no_ties && s1 == s2 {
                s2 += 1;
            }
            (a, b, s1, s2, rng.random_range(0..3u8))
        })
        .collect();
    season_from(&rows, teams)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Direct least-squares ratings: for each connected part, pin its first
/// team at 0, solve the normal equations of
/// `PR_1 - PR_2 = capped margin -/+ hfa` with LU, then shift so the part's
/// best team sits at `anchor`.
pub fn normal_equations_ratings(
    ds: &SeasonDataset,
    hfa: f64,
    margin_cap: Option<f64>,
    anchor: f64,
) -> BTreeMap<TeamId, f64> {
    let mut out = BTreeMap::new();
    for members in schedule_components(ds) {
        let idx: BTreeMap<&TeamId, usize> =
            members.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let free = members.len() - 1;
        let games: Vec<&Game> = ds
            .games()
            .iter()
            .filter(|g| idx.contains_key(&g.team1))
            .collect();
        let mut design = DMatrix::<f64>::zeros(games.len(), free);
        let mut target = DVector::<f64>::zeros(games.len());
        for (row, g) in games.iter().enumerate() {
            let (a, b) = (idx[&g.team1], idx[&g.team2]);
            if a > 0 {
                design[(row, a - 1)] += 1.0;
            }
            if b > 0 {
                design[(row, b - 1)] -= 1.0;
            }
            let mut raw = f64::from(g.score1) - f64::from(g.score2);
            if let Some(cap) = margin_cap {
                raw = raw.clamp(-cap, cap);
            }
            target[row] = raw
                - match g.venue {
                    Venue::Team1Home => hfa,
                    Venue::Team2Home => -hfa,
                    Venue::Neutral => 0.0,
                };
        }
        let mut ratings = vec![0.0; members.len()];
        if free > 0 {
            let normal = design.transpose() * &design;
            let rhs = design.transpose() * &target;
            let solved = normal
                .lu()
                .solve(&rhs)
                .expect("connected part gives a nonsingular system");
            ratings[1..].copy_from_slice(solved.as_slice());
        }
        let top = ratings.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (t, r) in members.iter().zip(ratings) {
            out.insert(t.clone(), r - top + anchor);
        }
    }
    out
}

pub fn max_abs_diff(a: &BTreeMap<TeamId, f64>, b: &BTreeMap<TeamId, f64>) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().map(|(t, x)| (x - b[t]).abs()).fold(0.0, f64::max)
}
