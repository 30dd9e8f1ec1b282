//! Experiment drivers: Monte Carlo checks of the random rule, adversary
//! campaigns, and potential-surface grids.

mod campaign;
mod grid;
mod montecarlo;

pub use campaign::{
    adversary_run, campaign, read_csv, verdicts, write_csv, AdversaryKind, AdversaryOutcome, AdversarySpec,
    CampaignConfig, CampaignEntry, CampaignRow, Verdicts, DEFAULT_MAX_STEPS,
};
pub use grid::{grid_phi, potential_grid, GridCell, PotentialGrid};
pub use montecarlo::{equal_goods_instance, montecarlo_rand, InstanceSummary, MonteCarloReport};
