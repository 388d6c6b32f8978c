"""Schema, sampling, rendering, labeling, and encoding of synthetic cases."""

from equarent.casegen.dataset import (
    Dataset,
    EncodingMap,
    ReductionLabel,
    build_encoding,
    decode,
    encode,
    ingest_labels,
    read_label_file,
    write_label_file,
)
from equarent.casegen.documents import RenderError, render_document, write_documents
from equarent.casegen.oracle import (
    Oracle,
    OracleCondition,
    OracleConfig,
    OracleNode,
    OracleTerm,
    TreeOracle,
    check_oracle,
    label_cases,
    load_oracle,
    oracle_label,
)
from equarent.casegen.sampler import SatisfiabilityError, sample_cases
from equarent.casegen.schema import (
    CaseRecord,
    Constraint,
    FeatureSchema,
    FeatureSpec,
    SchemaError,
    Violation,
    default_schema_path,
    load_schema,
    validate_case,
)

__all__ = [
    "CaseRecord", "Constraint", "Dataset", "EncodingMap", "FeatureSchema",
    "FeatureSpec", "Oracle", "OracleCondition", "OracleConfig", "OracleNode",
    "OracleTerm", "ReductionLabel", "RenderError", "SatisfiabilityError",
    "SchemaError", "TreeOracle", "Violation",
    "build_encoding", "check_oracle", "decode", "default_schema_path",
    "encode", "ingest_labels", "label_cases", "load_oracle", "load_schema",
    "oracle_label", "read_label_file", "render_document", "sample_cases",
    "validate_case", "write_documents", "write_label_file",
]
