"""Output schemas for the CLI file formats.

Every file the CLI writes carries SCHEMA_VERSION, either as a
"schema_version" JSON field or as a leading "# schema=..." comment line
in CSV files.  A machine-readable copy of this module's SCHEMAS dict is
written as schema.json next to every output set.
"""

SCHEMA_VERSION = "cfstats.v1"

SCHEMAS = {
    "trajectories.csv": {
        "comment_line": "# schema=cfstats.trajectories.v1",
        "columns": {
            "denominator": "int, exact common denominator q of the point",
            "num_k": "int, k-th numerator (one column per coordinate)",
            "depth": "int, number of digits in the canonical expansion",
            "weight": "float, (m+1) * log(denominator), 17 significant digits",
            "N_<label>": "int, occurrences of the target label in the expansion",
        },
        "order": "by denominator, then lexicographic numerators",
    },
    "histogram.csv": {
        "comment_line": "# schema=cfstats.histogram.v1",
        "columns": {
            "target": "string, the digit label the marginal belongs to",
            "bin_lo": "float, left bin edge of phi/sqrt(Q)",
            "bin_hi": "float, right bin edge",
            "count": "int, ensemble multiplicity in the bin",
        },
        "bins": "101 uniform bins over [-5 sigma, 5 sigma] per marginal",
    },
    "summary.json": {
        "schema_version": "string",
        "config": "the resolved experiment configuration",
        "ensemble_size": "int, number of enumerated points",
        "Q": "float, weight bound used for normalization",
        "lambda_empirical": "per-target mean count over Q",
        "lambda_spectral": "per-target frequency from the transfer operator",
        "covariance_empirical": "second-moment matrix of phi/sqrt(Q)",
        "covariance_spectral": "matrix from the eigenvalue Hessian",
        "mean_phi": "per-target mean of phi/sqrt(Q)",
        "ks_distance": "per-target KS distance to the centred Gaussian",
        "moments": "normalized mixed moments up to order 4, keys 'p1,p2,...'",
        "ldp": "per-epsilon deviation proportions and fitted slopes (ldp runs)",
        "ks_by_Q": "KS distance per grid point (clt runs)",
        "low_confidence": "bool, ensemble smaller than 100 points",
    },
    "constants.json": {
        "schema_version": "string",
        "algorithm": "string",
        "eigenvalue_at_1": "leading eigenvalue at (s, t) = (1, 0)",
        "eigenvalue_tail_bar": "bracket half-width from the truncated branch tail",
        "entropy": "-lambda_s(1, 0)",
        "lambda": "per-target digit frequencies",
        "sigma": "covariance matrix of the centred counts",
        "witnesses": "two periodic-point log-derivatives (gauss, brun only)",
        "witness_ratio_cf": "continued fraction of the witness ratio (diagnostic)",
    },
    "verify_report.json": {
        "schema_version": "string",
        "criteria": "list of {name, passed, detail}",
    },
}
