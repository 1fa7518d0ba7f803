//! CSV and JSON renderings of every result table.
//!
//! CSV rounds for display (two decimals, four for RPI); JSON carries full
//! precision. Both come from the same values.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::power_rating::RatingTable;
use crate::ranking::RankingList;
use crate::rpi::{Comparison, RpiTable};
use crate::s3s_points::{AllocationTable, SeasonTally};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn csv_string(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn f2(x: f64) -> String {
    // avoid printing "-0.00"
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn f4(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// Ratings with their point allocation, best team first.
pub fn ratings(rt: &RatingTable, alloc: &AllocationTable, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut rows = vec![vec![
                "team".into(),
                "pr".into(),
                "loss_cost".into(),
                "win_value".into(),
            ]];
            for (team, e) in alloc.ranked() {
                rows.push(vec![
                    team.name().into(),
                    f2(e.pr),
                    f2(e.loss_cost),
                    f2(e.win_value),
                ]);
            }
            csv_string(rows)
        }
        Format::Json => {
            let teams: serde_json::Map<String, Value> = alloc
                .entries
                .iter()
                .map(|(team, e)| {
                    (
                        team.name().to_string(),
                        json!({
                            "pr": e.pr,
                            "loss_cost": e.loss_cost,
                            "win_value": e.win_value,
                            "component": rt.component_of.get(team),
                        }),
                    )
                })
                .collect();
            json_string(&json!({
                "anchor": rt.anchor,
                "win_constant": alloc.win_constant,
                "hfa_used": rt.hfa_used,
                "iterations": rt.iterations,
                "converged": rt.converged,
                "components": rt.components.len(),
                "cross_component_comparison": rt.is_disconnected(),
                "beyond_kink": alloc.beyond_kink(),
                "teams": teams,
            }))
        }
    }
}

/// One team's season, line by line, with a totals footer.
pub fn tally(t: &SeasonTally, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut rows = vec![[
                "game_id",
                "opponent",
                "score",
                "wl_points",
                "hfa",
                "line_total",
            ]
            .map(String::from)
            .to_vec()];
            for l in &t.lines {
                rows.push(vec![
                    l.game_id.to_string(),
                    l.opponent.name().into(),
                    format!("{}-{}", l.goals_for, l.goals_against),
                    f2(l.wl_points),
                    f2(l.hfa_adjust),
                    f2(l.line_total),
                ]);
            }
            let footer = |label: &str, value: String| {
                vec![
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    label.into(),
                    value,
                ]
            };
            rows.push(footer("games_played", t.games_played.to_string()));
            rows.push(footer("raw_total", f2(t.raw_total)));
            rows.push(footer("normalized_total", f2(t.normalized_total)));
            csv_string(rows)
        }
        Format::Json => json_string(t),
    }
}

pub fn tallies(all: &BTreeMap<crate::ingest::TeamId, SeasonTally>) -> Result<String> {
    let map: serde_json::Map<String, Value> = all
        .iter()
        .map(|(team, t)| Ok((team.name().to_string(), serde_json::to_value(t)?)))
        .collect::<Result<_>>()?;
    json_string(&map)
}

pub fn ranking(list: &RankingList, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut rows = vec![[
                "rank",
                "team",
                "wins",
                "losses",
                "s3s_points",
                "pre_swap_rank",
            ]
            .map(String::from)
            .to_vec()];
            for e in &list.entries {
                rows.push(vec![
                    e.rank.to_string(),
                    e.team.name().into(),
                    e.wins.to_string(),
                    e.losses.to_string(),
                    f2(e.s3s_points),
                    e.pre_swap_rank.to_string(),
                ]);
            }
            csv_string(rows)
        }
        Format::Json => json_string(&json!({
            "tie_break": "normalized points, then head-to-head wins among tied teams, then raw total, then name",
            "entries": list.entries,
            "swaps_applied": list.swaps_applied,
        })),
    }
}

pub fn rpi(table: &RpiTable, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut rows = vec![["rank", "team", "rpi", "wins", "losses"]
                .map(String::from)
                .to_vec()];
            for (i, (team, r)) in table.ranked().into_iter().enumerate() {
                rows.push(vec![
                    (i + 1).to_string(),
                    team.name().into(),
                    f4(r.rpi),
                    r.wins.to_string(),
                    r.losses.to_string(),
                ]);
            }
            csv_string(rows)
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .ranked()
                .into_iter()
                .enumerate()
                .map(|(i, (team, r))| {
                    json!({
                        "rank": i + 1,
                        "team": team,
                        "rpi": r.rpi,
                        "wp": r.wp,
                        "owp": r.owp,
                        "oowp": r.oowp,
                        "wins": r.wins,
                        "losses": r.losses,
                        "ties": r.ties,
                    })
                })
                .collect();
            json_string(&json!({
                "weights": table.weights,
                "empty_record_wp": crate::rpi::EMPTY_RECORD_WP,
                "teams": rows,
            }))
        }
    }
}

/// Two panels, before and after, row by row at equal rank.
pub fn comparison(cmp: &Comparison, label: &Value, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let fmt = |x: f64| if cmp.method == "rpi" { f4(x) } else { f2(x) };
            let moved_before: BTreeMap<usize, bool> = cmp
                .deltas
                .iter()
                .map(|d| (d.rank_before, d.moved))
                .collect();
            let moved_after: BTreeMap<usize, bool> =
                cmp.deltas.iter().map(|d| (d.rank_after, d.moved)).collect();
            let mut rows = vec![[
                "rank",
                "team_before",
                "value_before",
                "moved_before",
                "team_after",
                "value_after",
                "moved_after",
            ]
            .map(String::from)
            .to_vec()];
            for (b, a) in cmp.before.iter().zip(&cmp.after) {
                rows.push(vec![
                    b.rank.to_string(),
                    b.team.name().into(),
                    fmt(b.value),
                    moved_before[&b.rank].to_string(),
                    a.team.name().into(),
                    fmt(a.value),
                    moved_after
                        .get(&a.rank)
                        .copied()
                        .unwrap_or(false)
                        .to_string(),
                ]);
            }
            csv_string(rows)
        }
        Format::Json => json_string(&json!({
            "experiment": label,
            "method": cmp.method,
            "moved": cmp.moved_count(),
            "before": cmp.before,
            "after": cmp.after,
            "deltas": cmp.deltas,
        })),
    }
}
