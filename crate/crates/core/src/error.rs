use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A row could not be read as a game.
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    /// A row parsed but violates a dataset rule.
    #[error("line {line}: {message}")]
    Validation { line: u64, message: String },

    #[error("invalid solver configuration: {0}")]
    Config(String),

    #[error("need at least 2 teams to solve ratings, found {0}")]
    TooFewTeams(usize),

    #[error("game {game_id} between {team1} and {team2} is tied; tied games have no S3S outcome")]
    TiedGame {
        game_id: u64,
        team1: String,
        team2: String,
    },

    #[error("opponent {opponent} of {team} has no allocation entry")]
    MissingAllocation { team: String, opponent: String },

    #[error("unknown team: {0}")]
    UnknownTeam(String),

    #[error("unknown game id: {0}")]
    UnknownGame(u64),

    #[error("games played must be at least 1")]
    NoGames,

    #[error("team {0} has not played any games")]
    TeamWithoutGames(String),

    #[error("{team} has {games} games but {replacements} replacement opponents were given")]
    ReplacementLength {
        team: String,
        games: usize,
        replacements: usize,
    },

    #[error("fixture {name}: {message}")]
    Fixture { name: String, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by bad input data rather than bad usage.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, Error::Config(_) | Error::Io(_))
    }
}
