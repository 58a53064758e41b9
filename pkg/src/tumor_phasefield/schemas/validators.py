from typing import Final

INVALID_CHARS: Final[set[str]] = set(r'\/:*?"<>| ')


def validate_safe_name(name: str) -> str:
    """Checks if the given string is safe for file and directory names.

    Raises:
        ValueError: If the name is empty, or invalid characters or spaces are found.
    """
    if not name:
        raise ValueError("Names of files and directories must not be empty.")
    if any(c in INVALID_CHARS for c in name):
        invalid_chars_display = ", ".join(sorted(INVALID_CHARS))
        raise ValueError(
            f"Invalid characters or spaces found in: '{name}'. "
            f"Prohibited: {invalid_chars_display}"
        )
    return name


def validate_epsilon_schedule(eps_list: list[float]) -> list[float]:
    """Checks that a continuation schedule is strictly decreasing inside (0, 1).

    Raises:
        ValueError: If the list is empty, unordered, or has values outside (0, 1).
    """
    if not eps_list:
        raise ValueError("The epsilon schedule must not be empty.")
    if any(not 0.0 < eps < 1.0 for eps in eps_list):
        raise ValueError(f"Every epsilon must lie in (0, 1), got {eps_list}.")
    if any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError(f"The epsilon schedule must be strictly decreasing, got {eps_list}.")
    return eps_list
