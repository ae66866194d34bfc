from pydantic import BaseModel, ConfigDict, Field


class Settings(BaseModel):
    """Search limits shared by the enumerator, the involution search and canonical forms."""

    model_config = ConfigDict(frozen=True)

    max_genus: int = Field(4, ge=2, description="Largest genus the enumerator accepts")
    max_r: int = Field(9, ge=0, description="Largest singularity index the enumerator accepts")
    canonical_candidate_limit: int = Field(
        40320, gt=0, description="Maximum vertex orderings tried when canonicalizing"
    )
    involution_candidate_limit: int = Field(
        200000, gt=0, description="Maximum decorated candidates examined per involution search"
    )


DEFAULT_SETTINGS = Settings()
