"""The closed set of language codes handled by the toolkit."""

LANGS = ("en", "hi", "ta", "te", "ml", "ur", "bn", "gu", "mr", "or", "pa")

PIVOT = "en"


class UnknownLanguageError(ValueError):
    pass


def parse_lang(code):
    """Return ``code`` normalised to lower case, or raise for codes outside the set."""
    if not isinstance(code, str):
        raise UnknownLanguageError(f"language code must be a string, got {code!r}")
    norm = code.strip().lower()
    if norm not in LANGS:
        raise UnknownLanguageError(f"unknown language code: {code!r}")
    return norm
