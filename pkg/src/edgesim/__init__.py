"""Analytical simulator and scheduling toolkit for heterogeneous edge NN
accelerators: layer characterization, family classification, dataflow cost
and energy models, and a two-phase layer-to-accelerator scheduler."""

from .cost import (
    Bottleneck,
    CostEstimate,
    CostOptions,
    effective_parallelism,
    estimate,
    param_fetch_multiplier,
    ridge_point,
    roofline_attainable,
)
from .energy import (
    EnergyBreakdown,
    buffer_effectiveness,
    energy_roofline,
    layer_energy,
    model_buffer_effectiveness,
)
from .engine import (
    ComparisonTable,
    Scenario,
    SimReport,
    canonical_scenarios,
    compare_suites,
    simulate,
)
from .errors import (
    ConfigurationError,
    EdgesimError,
    GenerationError,
    SchemaError,
    StructureError,
    ValidationError,
)
from .families import Family, classify, family_histogram, nearest_family
from .hardware import (
    AcceleratorConfig,
    DataflowKind,
    DramConfig,
    EnergyCoefficients,
    HardwareSuite,
    Placement,
    canonical_suite,
    load_suite,
    serialize_suite,
)
from .ir import (
    GateRole,
    LayerDescriptor,
    LayerKind,
    ModelClass,
    ModelGraph,
    MvmRole,
    RecurrentShape,
    build_transducer,
    load_model,
    serialize_model,
)
from .metrics import LayerMetrics, ModelMetrics, layer_metrics, model_metrics
from .scheduler import (
    Assignment,
    AssignmentReason,
    CommunicationEvent,
    FamilyRouting,
    SchedulePlan,
    canonical_routing,
    phase1,
    phase2,
    schedule,
    single_target_routing,
)
from .synthetic import SyntheticSuiteSpec, generate_suite

__all__ = [name for name in dir() if not name.startswith("_")]
