use crate::config::{ExperimentConfig, Horizon};
use crate::error::CliError;
use crate::experiments::{self, Outcome};

pub struct Entry {
    pub name: &'static str,
    /// The claim the experiment checks, one line.
    pub claim: &'static str,
    pub defaults: fn() -> ExperimentConfig,
    pub run: fn(&ExperimentConfig) -> Result<Outcome, CliError>,
}

fn base(name: &str, n_grid: &[u32], dt: f64, horizon: Horizon, replicas: u64) -> ExperimentConfig {
    ExperimentConfig {
        experiment: name.to_string(),
        n_grid: n_grid.to_vec(),
        lattice: None,
        dt,
        horizon,
        replicas,
        samples: 0,
        master_seed: 20240611,
        l_grid: Vec::new(),
        eps_grid: Vec::new(),
        test_functions: Vec::new(),
        output: None,
    }
}

pub const REGISTRY: [Entry; 12] = [
    Entry {
        name: "static-moments",
        claim: "stationary law: e^{-u} is β²·Gamma(ν), so E[W] = -β²/2 and Var[W] = β² + β⁴/2",
        defaults: || ExperimentConfig {
            samples: 1_000_000,
            ..base("static-moments", &[16, 64, 256], 1e-3, Horizon::Micro(1.0), 100)
        },
        run: experiments::static_moments,
    },
    Entry {
        name: "moment-scaling",
        claim: "centered k-th moments of u decay like n^{-k/4}",
        defaults: || ExperimentConfig {
            samples: 1_000_000,
            ..base("moment-scaling", &[16, 64, 256, 1024], 1e-3, Horizon::Micro(1.0), 100)
        },
        run: experiments::moment_scaling,
    },
    Entry {
        name: "stationarity",
        claim: "the product Gamma law is invariant for the increment dynamics",
        defaults: || ExperimentConfig {
            lattice: Some(64),
            ..base("stationarity", &[16], 1e-3, Horizon::Micro(4.0), 2000)
        },
        run: experiments::stationarity,
    },
    Entry {
        name: "oracle-equivalence",
        claim: "the increment scheme is the difference of the height scheme on shared noise",
        defaults: || ExperimentConfig {
            lattice: Some(64),
            ..base("oracle-equivalence", &[16], 1e-3, Horizon::Micro(10.0), 1)
        },
        run: experiments::oracle_equivalence,
    },
    Entry {
        name: "quadrature-check",
        claim: "the free-energy recursion is the log of the semi-discrete polymer partition function",
        defaults: || ExperimentConfig {
            ..base("quadrature-check", &[16], 5e-4, Horizon::Macro(1.0), 20)
        },
        run: experiments::quadrature_check,
    },
    Entry {
        name: "field-variance",
        claim: "the stationary fluctuation field is white noise: Var X(φ) → ||φ||²",
        defaults: || ExperimentConfig {
            test_functions: vec!["gaussian".into()],
            ..base("field-variance", &[256], 5e-3, Horizon::Macro(0.05), 2000)
        },
        run: experiments::field_variance,
    },
    Entry {
        name: "qv-limit",
        claim: "the martingale part has quadratic variation t·||∂φ||²",
        defaults: || ExperimentConfig {
            test_functions: vec!["gaussian".into()],
            ..base("qv-limit", &[256], 5e-3, Horizon::Macro(0.05), 200)
        },
        run: experiments::qv_limit,
    },
    Entry {
        name: "decomposition-residual",
        claim: "X_t - X_0 splits exactly into drift, frame and martingale parts",
        defaults: || base("decomposition-residual", &[256], 5e-3, Horizon::Macro(0.05), 20),
        run: experiments::decomposition_residual,
    },
    Entry {
        name: "bg2-scaling",
        claim: "order-2 Boltzmann-Gibbs error behaves like l/√n + T/l²",
        defaults: || ExperimentConfig {
            l_grid: vec![2, 4, 8, 16, 32, 64],
            ..base("bg2-scaling", &[256, 1024], 5e-3, Horizon::Micro(8.0), 200)
        },
        run: experiments::bg2_scaling,
    },
    Entry {
        name: "bg3-scaling",
        claim: "order-3 Boltzmann-Gibbs error is one power of √n smaller than order 2",
        defaults: || ExperimentConfig {
            l_grid: vec![2, 4, 8, 16, 32, 64],
            ..base("bg3-scaling", &[1024], 5e-3, Horizon::Micro(8.0), 200)
        },
        run: experiments::bg3_scaling,
    },
    Entry {
        name: "ec2-cauchy",
        claim: "regularised quadratic terms are Cauchy in ε with variance O(ε)",
        defaults: || ExperimentConfig {
            eps_grid: vec![0.1, 0.2, 0.4, 0.8],
            ..base("ec2-cauchy", &[1024], 5e-3, Horizon::Macro(0.125), 200)
        },
        run: experiments::ec2_cauchy,
    },
    Entry {
        name: "generator-identities",
        claim: "Dynkin derivatives of u_j² and u_j³ match the generator applied to them",
        defaults: || base("generator-identities", &[16], 1e-3, Horizon::Micro(0.01), 100_000),
        run: experiments::generator_identities,
    },
];

pub fn lookup(name: &str) -> Result<&'static Entry, CliError> {
    REGISTRY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CliError::UnknownExperiment(name.to_string()))
}
