use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "threshold-lab", version, about = "Thresholds, exact covers, and the fragmentation process for monotone set systems")]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Enumeration cap overrides, e.g. "exact_n=24,dp=22" (also read from
    /// the THRESHOLD_LAB_CAPS environment variable).
    #[arg(long, global = true)]
    pub caps: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Family summary: sizes, boundedness, antichain flag.
    Info {
        family: PathBuf,
    },
    /// Expected hits e_q, the q-cost c_q with witness cover, and the
    /// q-smallness verdict.
    Cost {
        family: PathBuf,
        /// Probabilities: a uniform value ("0.3"), a comma list, or omitted
        /// to use the family file's "q".
        #[arg(long)]
        q: Option<String>,
        /// Greedy upper bound instead of the exact solver.
        #[arg(long)]
        greedy: bool,
        /// Exact rational arithmetic (q parsed as exact decimals or
        /// fractions).
        #[arg(long)]
        rational: bool,
        /// Exit 4 unless the family is q-small.
        #[arg(long)]
        assert: bool,
    },
    /// Pr[X_p ∈ ⟨F⟩], exact or Monte Carlo.
    Prob {
        family: PathBuf,
        #[arg(long)]
        p: String,
        /// Monte Carlo mode.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
    },
    /// Bracket the probability threshold p_c.
    Pc {
        family: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
    },
    /// Bracket the expectation threshold q_c.
    Qc {
        family: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Both thresholds plus the Kahn–Kalai gap bounds.
    Kk {
        family: PathBuf,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Exit 4 unless the gap bounds hold.
        #[arg(long)]
        assert: bool,
    },
    /// One fragmentation step: F, F*, and the large/small split for an
    /// explicit revealed set.
    Fragment {
        family: PathBuf,
        /// Revealed elements, e.g. "0,2,5" (empty string for ∅).
        #[arg(long, default_value = "")]
        reveal: String,
        /// Split threshold; omit to skip the split.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Run the k-round process many times and aggregate.
    Simulate {
        family: PathBuf,
        #[arg(long)]
        q: Option<String>,
        #[arg(long, default_value = "paper")]
        schedule: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Compute exact per-round large-part costs.
        #[arg(long)]
        costs: bool,
        /// Write one JSON trace per line here.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Exit 4 when the member-hit fraction falls 3σ below 1/2.
        #[arg(long)]
        assert: bool,
    },
    /// Exact verification of one of the two cost lemmas.
    Verify {
        family: PathBuf,
        /// Which lemma: 1 (ℓ-bounded cost lemma) or 2 (1-bounded case).
        #[arg(long)]
        lemma: u8,
        #[arg(long)]
        q: Option<String>,
        /// Amplification exponent L.
        #[arg(long)]
        amp: f64,
        /// Large-fragment threshold m (lemma 1 only).
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Exit 4 unless the inequality holds.
        #[arg(long)]
        assert: bool,
    },
    /// Exact-rational certification of the series bound.
    Certify {
        #[arg(long, default_value = "paper")]
        schedule: String,
        #[arg(long, default_value_t = 30)]
        i_max: u32,
        /// Blocks up to this index are computed exactly; later blocks use
        /// certified upper bounds.
        #[arg(long, default_value_t = 14)]
        exact_limit: u32,
        /// Evaluate the L = 6 closed form instead of the series.
        #[arg(long)]
        closed_form: bool,
        /// Print a human-readable term-by-term log to stderr.
        #[arg(long)]
        proof_log: bool,
        /// Exit 4 unless the verdict is below-half.
        #[arg(long)]
        assert: bool,
    },
    /// Generate a structured or random family file.
    Gen {
        #[command(subcommand)]
        model: GenModel,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenModel {
    /// Edge sets of all k-cliques of K_v.
    Clique {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        size: usize,
    },
    /// Edge sets of all perfect matchings of K_v.
    Matching {
        #[arg(long)]
        vertices: usize,
    },
    /// Edge sets of all d-leaf stars of K_v.
    Star {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        leaves: usize,
    },
    /// Distinct random subsets with sizes in 1..=ell.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}
