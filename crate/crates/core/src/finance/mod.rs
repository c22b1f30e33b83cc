//! Correlation-network and board-interlock workflows.
//!
//! Market side: daily returns are cut into calendar windows, turned into a
//! distance matrix `d = √(2(1-ρ))`, reduced to a minimum spanning tree and
//! ranked across the ζ grid. Corporate side: the company projection of a
//! board-membership graph gives `ΔRank(R)`, which a one-variable linear
//! discriminant relates to the trend in shareholder value creation.

mod corporate;
mod market;
mod returns;

pub use corporate::{
    corporate_pipeline, delta_rank, lda_fit, lda_predict, load_svc, parse_svc, svc_trend, synthetic_corporate,
    CompanyRow, Confusion, CorporateOptions, CorporateReport, LdaModel,
};
pub use market::{
    compare_windows, correlation_and_distance, mantegna_distance, market_pipeline, mst, mst_edges,
    report_from_distance, tree_graph, window_rank_report, Correlation, MarketOptions, Weighting, WindowReport,
    DISTANCE_FLOOR,
};
pub use returns::{rolling_windows, ReturnsPanel, WindowSlice, WindowSpec};
