//! Season game data: parsing, validation, and the schedule graph.
//!
//! Input is a CSV file with the header
//! `game_id,team1,team2,score1,score2,home_team`, or the compact form
//! `game_id,team1,team2,score,home_team` where `score` is written `17-13`.
//! The compact form is converted on read; [`SeasonDataset::to_csv`] always
//! emits the two-column form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::Read;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const HEADER_SPLIT: [&str; 6] = ["game_id", "team1", "team2", "score1", "score2", "home_team"];
const HEADER_JOINED: [&str; 5] = ["game_id", "team1", "team2", "score", "home_team"];

/// A team name. Whitespace is trimmed and collapsed; comparison ignores case.
#[derive(Clone, Debug)]
pub struct TeamId {
    name: String,
    key: String,
}

impl TeamId {
    /// Returns `None` when the name is blank.
    pub fn new(raw: &str) -> Option<Self> {
        let name = raw.split_whitespace().collect::<Vec<_>>().join(" ");
        if name.is_empty() {
            return None;
        }
        let key = name.to_lowercase();
        Some(TeamId { name, key })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Case-folded form used for equality and ordering.
    pub fn key(&self) -> &str {
        &self.key
    }
}

impl PartialEq for TeamId {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for TeamId {}

impl Hash for TeamId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl PartialOrd for TeamId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TeamId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for TeamId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name)
    }
}

/// Which side, if any, played at home.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Venue {
    Team1Home,
    Team2Home,
    Neutral,
}

impl Venue {
    fn swapped(self) -> Self {
        match self {
            Venue::Team1Home => Venue::Team2Home,
            Venue::Team2Home => Venue::Team1Home,
            Venue::Neutral => Venue::Neutral,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    pub game_id: u64,
    pub team1: TeamId,
    pub team2: TeamId,
    pub score1: u32,
    pub score2: u32,
    pub venue: Venue,
}

impl Game {
    pub fn involves(&self, team: &TeamId) -> bool {
        self.team1 == *team || self.team2 == *team
    }

    pub fn opponent_of(&self, team: &TeamId) -> Option<&TeamId> {
        if self.team1 == *team {
            Some(&self.team2)
        } else if self.team2 == *team {
            Some(&self.team1)
        } else {
            None
        }
    }

    /// `(goals for, goals against)` from `team`'s side.
    pub fn scores_for(&self, team: &TeamId) -> Option<(u32, u32)> {
        if self.team1 == *team {
            Some((self.score1, self.score2))
        } else if self.team2 == *team {
            Some((self.score2, self.score1))
        } else {
            None
        }
    }

    pub fn is_tie(&self) -> bool {
        self.score1 == self.score2
    }

    pub fn winner(&self) -> Option<&TeamId> {
        match self.score1.cmp(&self.score2) {
            Ordering::Greater => Some(&self.team1),
            Ordering::Less => Some(&self.team2),
            Ordering::Equal => None,
        }
    }

    pub fn home_team(&self) -> Option<&TeamId> {
        match self.venue {
            Venue::Team1Home => Some(&self.team1),
            Venue::Team2Home => Some(&self.team2),
            Venue::Neutral => None,
        }
    }

    /// The same game listed from the other side: teams, scores and venue
    /// roles all exchanged.
    pub fn mirrored(&self) -> Game {
        Game {
            game_id: self.game_id,
            team1: self.team2.clone(),
            team2: self.team1.clone(),
            score1: self.score2,
            score2: self.score1,
            venue: self.venue.swapped(),
        }
    }

    /// The result reversed: scores exchanged, teams and venue kept.
    pub fn reversed_result(&self) -> Game {
        Game {
            score1: self.score2,
            score2: self.score1,
            ..self.clone()
        }
    }
}

/// Every game of a season, in file order, plus the set of teams that
/// appear in them.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SeasonDataset {
    games: Vec<Game>,
    teams: Vec<TeamId>,
}

impl SeasonDataset {
    /// Validates and indexes `games`. Team spellings are unified to the
    /// first spelling seen for each name. Error line numbers refer to the
    /// row each game would occupy in [`SeasonDataset::to_csv`] output.
    pub fn new(games: Vec<Game>) -> Result<Self> {
        let lines: Vec<u64> = (0..games.len() as u64).map(|i| i + 2).collect();
        Self::build(games, &lines)
    }

    fn build(mut games: Vec<Game>, lines: &[u64]) -> Result<Self> {
        let mut seen_ids = HashSet::new();
        let mut spelling: HashMap<String, TeamId> = HashMap::new();
        for (game, &line) in games.iter_mut().zip(lines) {
            if game.team1 == game.team2 {
                return Err(Error::Validation {
                    line,
                    message: format!("game {} lists {} against itself", game.game_id, game.team1),
                });
            }
            if !seen_ids.insert(game.game_id) {
                return Err(Error::Validation {
                    line,
                    message: format!("duplicate game_id {}", game.game_id),
                });
            }
            for team in [&mut game.team1, &mut game.team2] {
                let canonical = spelling
                    .entry(team.key.clone())
                    .or_insert_with(|| team.clone());
                *team = canonical.clone();
            }
        }
        let mut teams: Vec<TeamId> = spelling.into_values().collect();
        teams.sort();
        Ok(SeasonDataset { games, teams })
    }

    pub fn games(&self) -> &[Game] {
        &self.games
    }

    /// Teams in lexicographic (case-folded) order.
    pub fn teams(&self) -> &[TeamId] {
        &self.teams
    }

    pub fn is_empty(&self) -> bool {
        self.games.is_empty()
    }

    pub fn contains_team(&self, team: &TeamId) -> bool {
        self.teams.binary_search(team).is_ok()
    }

    /// Looks a team up by name, returning the dataset's spelling.
    pub fn find_team(&self, name: &str) -> Option<&TeamId> {
        let probe = TeamId::new(name)?;
        self.teams
            .binary_search(&probe)
            .ok()
            .map(|i| &self.teams[i])
    }

    pub fn team_index(&self, team: &TeamId) -> Option<usize> {
        self.teams.binary_search(team).ok()
    }

    pub fn games_of<'a>(&'a self, team: &'a TeamId) -> impl Iterator<Item = &'a Game> + 'a {
        self.games.iter().filter(move |g| g.involves(team))
    }

    pub fn game(&self, game_id: u64) -> Option<&Game> {
        self.games.iter().find(|g| g.game_id == game_id)
    }

    /// `(wins, losses, ties)` for `team` over the whole dataset.
    pub fn record(&self, team: &TeamId) -> (u32, u32, u32) {
        let mut record = (0, 0, 0);
        for game in self.games_of(team) {
            match game.winner() {
                Some(w) if w == team => record.0 += 1,
                Some(_) => record.1 += 1,
                None => record.2 += 1,
            }
        }
        record
    }

    /// Returns a copy with one game replaced by `f(game)`.
    pub fn with_game_mapped(&self, game_id: u64, f: impl FnOnce(&Game) -> Game) -> Result<Self> {
        let pos = self
            .games
            .iter()
            .position(|g| g.game_id == game_id)
            .ok_or(Error::UnknownGame(game_id))?;
        let mut games = self.games.clone();
        games[pos] = f(&games[pos]);
        SeasonDataset::new(games)
    }

    /// Canonical two-score-column CSV.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(HEADER_SPLIT).expect("in-memory write");
        for g in &self.games {
            let home = match g.venue {
                Venue::Team1Home => g.team1.name(),
                Venue::Team2Home => g.team2.name(),
                Venue::Neutral => "neutral",
            };
            writer
                .write_record([
                    g.game_id.to_string().as_str(),
                    g.team1.name(),
                    g.team2.name(),
                    g.score1.to_string().as_str(),
                    g.score2.to_string().as_str(),
                    home,
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

#[derive(Clone, Copy)]
enum Layout {
    Split,
    Joined,
}

/// Parses a season file. Rows keep file order.
pub fn parse_dataset<R: Read>(input: R) -> Result<SeasonDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing header row".into(),
            })
        }
    };
    let columns: Vec<String> = header
        .iter()
        .map(|c| c.trim_start_matches('\u{feff}').to_lowercase())
        .collect();
    let layout = if columns == HEADER_SPLIT {
        Layout::Split
    } else if columns == HEADER_JOINED {
        Layout::Joined
    } else {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "unrecognized header {:?}; expected {} or {}",
                header.iter().collect::<Vec<_>>().join(","),
                HEADER_SPLIT.join(","),
                HEADER_JOINED.join(",")
            ),
        });
    };

    let mut games = Vec::new();
    let mut lines = Vec::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        games.push(parse_row(&record, layout, line)?);
        lines.push(line);
    }
    SeasonDataset::build(games, &lines)
}

fn parse_row(record: &csv::StringRecord, layout: Layout, line: u64) -> Result<Game> {
    let parse_err = |message: String| Error::Parse { line, message };
    let expected = match layout {
        Layout::Split => HEADER_SPLIT.len(),
        Layout::Joined => HEADER_JOINED.len(),
    };
    if record.len() != expected {
        return Err(parse_err(format!(
            "expected {expected} columns, found {}",
            record.len()
        )));
    }

    let game_id: u64 = record[0].parse().map_err(|_| {
        parse_err(format!(
            "game_id {:?} is not a non-negative integer",
            &record[0]
        ))
    })?;
    let team1 = TeamId::new(&record[1]).ok_or_else(|| parse_err("team1 is empty".into()))?;
    let team2 = TeamId::new(&record[2]).ok_or_else(|| parse_err("team2 is empty".into()))?;

    let (score1, score2, home) = match layout {
        Layout::Split => (
            parse_score(&record[3]).map_err(parse_err)?,
            parse_score(&record[4]).map_err(parse_err)?,
            &record[5],
        ),
        Layout::Joined => {
            let (a, b) = record[3].split_once('-').ok_or_else(|| {
                parse_err(format!("score {:?} is not of the form S1-S2", &record[3]))
            })?;
            (
                parse_score(a).map_err(parse_err)?,
                parse_score(b).map_err(parse_err)?,
                &record[4],
            )
        }
    };

    let venue = if let Some(home_team) = TeamId::new(home) {
        if home_team == team1 {
            Venue::Team1Home
        } else if home_team == team2 {
            Venue::Team2Home
        } else if home_team.key() == "neutral" {
            Venue::Neutral
        } else {
            return Err(Error::Validation {
                line,
                message: format!("home team {home_team} is neither {team1} nor {team2}"),
            });
        }
    } else {
        Venue::Neutral
    };

    Ok(Game {
        game_id,
        team1,
        team2,
        score1,
        score2,
        venue,
    })
}

fn parse_score(raw: &str) -> std::result::Result<u32, String> {
    let raw = raw.trim();
    match raw.parse::<i64>() {
        Ok(v) if v < 0 => Err(format!("negative score {v}")),
        Ok(v) => u32::try_from(v).map_err(|_| format!("score {v} out of range")),
        Err(_) => Err(format!("score {raw:?} is not an integer")),
    }
}

/// Connected components of the "played each other" graph, largest first,
/// ties broken by smallest member. Members are sorted.
pub fn schedule_components(ds: &SeasonDataset) -> Vec<Vec<TeamId>> {
    let teams = ds.teams();
    let mut parent: Vec<usize> = (0..teams.len()).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for g in ds.games() {
        let a = ds.team_index(&g.team1).expect("indexed team");
        let b = ds.team_index(&g.team2).expect("indexed team");
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }

    let mut groups: BTreeMap<usize, Vec<TeamId>> = BTreeMap::new();
    for (i, team) in teams.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(team.clone());
    }
    let mut components: Vec<Vec<TeamId>> = groups.into_values().collect();
    components.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<SeasonDataset> {
        parse_dataset(text.as_bytes())
    }

    fn team(name: &str) -> TeamId {
        TeamId::new(name).unwrap()
    }

    #[test]
    fn joined_score_row() {
        let ds =
            parse("game_id,team1,team2,score,home_team\n211,Virginia,Michigan,17-13,Virginia\n")
                .unwrap();
        let g = &ds.games()[0];
        assert_eq!(g.game_id, 211);
        assert_eq!(g.team1.name(), "Virginia");
        assert_eq!(g.team2.name(), "Michigan");
        assert_eq!((g.score1, g.score2), (17, 13));
        assert_eq!(g.venue, Venue::Team1Home);
    }

    #[test]
    fn empty_home_is_neutral_and_zero_scores_are_legal() {
        let ds = parse("game_id,team1,team2,score,home_team\n1,A,B,0-0,\n").unwrap();
        assert_eq!(ds.games()[0].venue, Venue::Neutral);
        assert_eq!((ds.games()[0].score1, ds.games()[0].score2), (0, 0));

        let ds = parse("game_id,team1,team2,score1,score2,home_team\n1,A,B,3,2,Neutral\n").unwrap();
        assert_eq!(ds.games()[0].venue, Venue::Neutral);
    }

    #[test]
    fn self_play_is_rejected() {
        let err = parse("game_id,team1,team2,score,home_team\n2,A,A,5-3,A\n").unwrap_err();
        assert!(matches!(err, Error::Validation { line: 2, .. }), "{err}");
        let err = parse("game_id,team1,team2,score,home_team\n2,A, a ,5-3,A\n").unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let header = "game_id,team1,team2,score1,score2,home_team\n";
        let cases = [
            "1,A,B,3,2,A\n2,A,B,3,A\n",
            "1,A,B,3,2,A\n2,A,B,x,2,A\n",
            "1,A,B,3,2,A\n2,A,B,-1,2,A\n",
            "1,A,B,3,2,A\n2,A,B,1.5,2,A\n",
        ];
        for body in cases {
            let err = parse(&format!("{header}{body}")).unwrap_err();
            assert!(
                matches!(err, Error::Parse { line: 3, .. }),
                "{body:?}: {err}"
            );
        }
    }

    #[test]
    fn home_team_must_be_a_participant() {
        let err = parse("game_id,team1,team2,score,home_team\n1,A,B,3-2,C\n").unwrap_err();
        assert!(matches!(err, Error::Validation { line: 2, .. }));
    }

    #[test]
    fn duplicate_game_id_is_rejected() {
        let err =
            parse("game_id,team1,team2,score,home_team\n1,A,B,3-2,A\n1,C,D,3-2,C\n").unwrap_err();
        assert!(matches!(err, Error::Validation { line: 3, .. }));
    }

    #[test]
    fn bad_header_and_empty_input() {
        assert!(matches!(parse(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse("id,home,away\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse("game_id,team1,team2,score1,score2,home_team\n")
            .unwrap()
            .is_empty());
    }

    #[test]
    fn names_are_normalized_and_unified() {
        let ds = parse(
            "game_id,team1,team2,score,home_team\n1,  Ohio   State ,Virginia,6-17,virginia\n2,ohio state,Penn,3-4,\n",
        )
        .unwrap();
        assert_eq!(ds.teams().len(), 3);
        assert_eq!(ds.games()[0].team1.name(), "Ohio State");
        assert_eq!(ds.games()[1].team1.name(), "Ohio State");
        assert_eq!(ds.games()[0].venue, Venue::Team2Home);
        assert_eq!(ds.find_team("OHIO STATE").unwrap().name(), "Ohio State");
    }

    #[test]
    fn repeat_meetings_are_kept() {
        let ds = parse("game_id,team1,team2,score,home_team\n1,A,B,3-2,A\n2,A,B,3-2,A\n").unwrap();
        assert_eq!(ds.games().len(), 2);
    }

    #[test]
    fn csv_round_trip() {
        let ds = parse(
            "game_id,team1,team2,score,home_team\n1,\"St. Mary's, MD\",B,3-2,B\n2,A,B,0-0,\n3,C,A,9-1,C\n",
        )
        .unwrap();
        let again = parse(&ds.to_csv()).unwrap();
        assert_eq!(ds, again);
    }

    #[test]
    fn components() {
        let ds = parse("game_id,team1,team2,score,home_team\n1,A,B,1-0,\n2,B,C,1-0,\n").unwrap();
        assert_eq!(
            schedule_components(&ds),
            vec![vec![team("A"), team("B"), team("C")]]
        );

        let ds = parse("game_id,team1,team2,score,home_team\n1,C,D,1-0,\n2,A,B,1-0,\n").unwrap();
        assert_eq!(
            schedule_components(&ds),
            vec![vec![team("A"), team("B")], vec![team("C"), team("D")]]
        );

        let ds = parse("game_id,team1,team2,score,home_team\n").unwrap();
        assert!(schedule_components(&ds).is_empty());
    }

    #[test]
    fn components_sorted_by_size() {
        let ds = parse("game_id,team1,team2,score,home_team\n1,A,B,1-0,\n2,X,Y,1-0,\n3,Y,Z,1-0,\n")
            .unwrap();
        let comps = schedule_components(&ds);
        assert_eq!(comps[0].len(), 3);
        assert_eq!(comps[1], vec![team("A"), team("B")]);
    }
}
