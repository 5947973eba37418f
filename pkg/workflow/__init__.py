# Workflow Package Initialization

from .verification import (
    VerificationState,
    detect_kind,
    run_verification
)

__all__ = [
    'VerificationState',
    'detect_kind',
    'run_verification'
]
