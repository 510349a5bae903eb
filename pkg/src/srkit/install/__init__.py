"""Schema installation: element identity, migration planning, and the
generated per-project configuration artifacts."""

from .configs import (
    OPERATIONS,
    PAGE_TEMPLATES,
    Attribute,
    EntityConfig,
    derive_entity_configs,
)
from .elements import (
    ACTIVE,
    DEACTIVATED,
    DeclaredElement,
    ProjectSchema,
    SchemaElement,
    category_id,
    choice_descriptor,
    choice_id,
    criterion_id,
    declared_elements,
    empty_schema,
    natural_id,
    phase_id,
    policies_doc,
    role_id,
)
from .forms import FormDescriptor, FormField, derive_form
from .migrate import (
    ADD,
    DEACTIVATE,
    DROP,
    E_ILLEGAL_DROP,
    E_STALE_SCHEMA,
    E_VERSION_CONFLICT,
    InstallError,
    MigrationOp,
    MigrationPlan,
    REACTIVATE,
    apply_plan,
    compile_model,
    diff,
)

__all__ = [
    "ACTIVE",
    "ADD",
    "Attribute",
    "DEACTIVATE",
    "DEACTIVATED",
    "DROP",
    "DeclaredElement",
    "E_ILLEGAL_DROP",
    "E_STALE_SCHEMA",
    "E_VERSION_CONFLICT",
    "EntityConfig",
    "FormDescriptor",
    "FormField",
    "InstallError",
    "MigrationOp",
    "MigrationPlan",
    "OPERATIONS",
    "PAGE_TEMPLATES",
    "ProjectSchema",
    "REACTIVATE",
    "SchemaElement",
    "apply_plan",
    "category_id",
    "choice_descriptor",
    "choice_id",
    "compile_model",
    "criterion_id",
    "declared_elements",
    "derive_entity_configs",
    "derive_form",
    "diff",
    "empty_schema",
    "natural_id",
    "phase_id",
    "policies_doc",
    "role_id",
]
