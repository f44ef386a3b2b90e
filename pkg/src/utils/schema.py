from packaging import version

from config import REPORT_SCHEMA_VERSION


def is_supported(schema: str | None) -> bool:
    if schema is None:
        return True
    try:
        remote = version.parse(str(schema))
    except version.InvalidVersion:
        return False
    return remote.major <= version.parse(REPORT_SCHEMA_VERSION).major
