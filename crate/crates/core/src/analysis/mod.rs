//! Graph-level analysis over decision maps and effect matrices: synergy
//! chains, trade-offs, most-affected QAs and the what-if engine.

mod chains;
mod tradeoffs;
mod whatif;

pub use chains::{find_synergy_chains, SynergyChain};
pub use tradeoffs::{
    find_tradeoffs, most_affected_qas, rank_affected, tradeoffs_in, AffectedCount, AffectedRanking,
    TradeoffRecord, TradeoffScope,
};
pub use whatif::{
    apply_whatif, AlternativeDelta, CellOverride, ChainChange, ChangedChain, PairDelta, WhatIfError,
    WhatIfOptions, WhatIfOutcome, WhatIfPatch, WhatIfReport, WHATIF_CHAIN_MIN_LENGTH,
};
