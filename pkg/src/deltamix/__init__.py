"""Simulator for phase- and frequency-controlled microwave amplification
and attenuation in a cyclically driven three-level Delta-type system.

Layers:
    lindblad     exact master-equation model (Hamiltonian, Liouvillian,
                 time evolution, steady state, weak-field order oracle)
    mixing       closed-form perturbative coherences and the shared
                 response denominator
    propagation  coupled envelope pairs, matrix-exponential / stepwise /
                 analytic output paths, interference decomposition
    sweep        configuration, detuning sweeps, figure presets, CSV,
                 validation
    plotting     matplotlib rendering of sweep results
    cli          the ``deltamix`` command
"""

from .errors import (
    ConfigError,
    DegenerateSteadyStateError,
    DeltamixError,
    IntegrationError,
    NonHermitianError,
    NormalizationError,
    PerturbationFitError,
    SingularRatioError,
)
from .lindblad import (
    CoherenceSet,
    DensityMatrix3,
    DriveConfiguration,
    DriveField,
    EffectiveLinewidths,
    Liouvillian,
    RelaxationRates,
    build_hamiltonian,
    build_liouvillian,
    effective_linewidths,
    evolve,
    extract_weak_field_orders,
    steady_state,
    steady_state_residual,
)
from .mixing import (
    coherence_set,
    first_order_coherences,
    perturbativity_warning,
    second_order_coherences,
    xi,
)
from .propagation import (
    ChannelIntensities,
    FieldAmplitudes,
    InterferenceRecord,
    PairPropagator,
    closed_form_F,
    closed_form_G,
    closed_form_outputs,
    interference_decomposition,
    pair_matrices,
    propagate_expm,
    propagate_fields,
    propagate_stepwise,
)
from .sweep import (
    CSV_COLUMNS,
    PRESET_NAMES,
    SimulationConfig,
    SweepRow,
    SweepSpec,
    ValidationReport,
    emit_csv,
    figure_preset,
    load_config,
    parse_config_text,
    run_sweep,
    save_config,
    serialize_config,
    validate,
)

__version__ = "0.1.0"
