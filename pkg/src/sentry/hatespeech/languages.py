"""Bundled language resources: stopword lists, suffix-stripping stemmer
rules, a small augmentation thesaurus, and stopword-profile language
detection for English, Portuguese, and Spanish.

The lists are deliberately self-contained (no external corpora) and are
the single source of truth for every text-processing stage, so matching
behavior is reproducible across installs.
"""
from __future__ import annotations

from typing import NamedTuple

LANGUAGES = ("en", "pt", "es")

STOPWORDS: dict[str, frozenset[str]] = {
    "en": frozenset(
        """
        the a an and or but if then else of to in on at by for with from as is
        are was were be been being am do does did done have has had having i
        you he she it we they me him her them my your his its our their this
        that these those there here what which who whom whose when where why
        how not no nor so than too very can will just should would could
        """.split()
    ),
    "pt": frozenset(
        """
        o a os as um uma uns umas de do da dos das em no na nos nas por pelo
        pela pelos pelas para com sem sob sobre e ou mas se que quem qual
        quais quando onde como porque não sim eu tu ele ela nós vós eles elas
        me te lhe nosso nossa meu minha teu tua seu sua este esta isto esse
        essa isso aquele aquela aquilo ao aos à às já também só mais menos
        muito pouco era foi são é estão está estou ser estar ter tem têm
        tinha foram nao aqui ali lá
        """.split()
    ),
    "es": frozenset(
        """
        el la los las un una unos unas de del a al en con por para sin sobre
        y e o u pero si que quien cual cuales cuando donde como porque no sí
        yo tú él ella nosotros vosotros ellos ellas me te le nos os les mi
        mis tu tus su sus este esta esto ese esa eso aquel aquella aquello ya
        también solo más menos muy poco era fue son es están está estoy ser
        estar tener tiene tienen tenía fueron aquí allí allá
        """.split()
    ),
}

# ordered (suffix, replacement) pairs, tried longest-match-first per pass;
# stripping repeats until a fixed point so normalization is idempotent
STEM_RULES: dict[str, tuple[tuple[str, str], ...]] = {
    "en": (
        ("ingly", ""),
        ("edly", ""),
        ("fully", ""),
        ("ness", ""),
        ("ment", ""),
        ("ations", "ate"),
        ("ation", "ate"),
        ("ies", "y"),
        ("ied", "y"),
        ("ing", ""),
        ("est", ""),
        ("ers", ""),
        ("ed", ""),
        ("ly", ""),
        ("es", ""),
        ("er", ""),
        ("s", ""),
    ),
    "pt": (
        ("amentos", ""),
        ("imentos", ""),
        ("amento", ""),
        ("imento", ""),
        ("adoras", ""),
        ("adores", ""),
        ("mente", ""),
        ("idades", ""),
        ("idade", ""),
        ("issimo", ""),
        ("issima", ""),
        ("íssimo", ""),
        ("íssima", ""),
        ("ações", "a"),
        ("ação", "a"),
        ("ções", ""),
        ("ção", ""),
        ("aram", ""),
        ("eram", ""),
        ("iram", ""),
        ("ando", ""),
        ("endo", ""),
        ("indo", ""),
        ("osos", ""),
        ("osas", ""),
        ("oso", ""),
        ("osa", ""),
        ("ista", ""),
        ("ismo", ""),
        ("eis", ""),
        ("ais", ""),
        ("res", ""),
        ("es", ""),
        ("as", ""),
        ("os", ""),
        ("a", ""),
        ("e", ""),
        ("o", ""),
        ("s", ""),
    ),
    "es": (
        ("amientos", ""),
        ("imientos", ""),
        ("amiento", ""),
        ("imiento", ""),
        ("adores", ""),
        ("adoras", ""),
        ("mente", ""),
        ("idades", ""),
        ("idad", ""),
        ("ísimo", ""),
        ("ísima", ""),
        ("aciones", "a"),
        ("ación", "a"),
        ("ciones", ""),
        ("ción", ""),
        ("aron", ""),
        ("ieron", ""),
        ("ando", ""),
        ("iendo", ""),
        ("osos", ""),
        ("osas", ""),
        ("oso", ""),
        ("osa", ""),
        ("ista", ""),
        ("ismo", ""),
        ("res", ""),
        ("es", ""),
        ("as", ""),
        ("os", ""),
        ("a", ""),
        ("e", ""),
        ("o", ""),
        ("s", ""),
    ),
}

_MIN_STEM = 3

THESAURUS: dict[str, dict[str, str]] = {
    "en": {
        "stupid": "dumb",
        "awful": "terrible",
        "trash": "garbage",
        "people": "folks",
        "meeting": "briefing",
        "report": "summary",
        "good": "great",
        "team": "crew",
        "hate": "despise",
        "vermin": "pests",
    },
    "pt": {
        "idiota": "imbecil",
        "lixo": "entulho",
        "pessoas": "gente",
        "reunião": "encontro",
        "relatório": "resumo",
        "bom": "ótimo",
        "equipe": "time",
        "escória": "ralé",
    },
    "es": {
        "idiota": "imbécil",
        "basura": "desecho",
        "personas": "gente",
        "reunión": "encuentro",
        "informe": "resumen",
        "bueno": "genial",
        "equipo": "grupo",
        "escoria": "chusma",
    },
}


def stem(token: str, language: str) -> str:
    """Suffix-strip to a fixed point; English collapses a trailing double
    consonant after a strip (running -> runn -> run)."""
    rules = STEM_RULES[language]
    prev = None
    while token != prev:
        prev = token
        for suffix, repl in rules:
            if token.endswith(suffix) and len(token) - len(suffix) + len(repl) >= _MIN_STEM:
                token = token[: len(token) - len(suffix)] + repl
                if language == "en" and len(token) >= 2 and token[-1] == token[-2] and token[-1] not in "aeiou":
                    if len(token) - 1 >= _MIN_STEM:
                        token = token[:-1]
                break
    return token


class LanguageGuess(NamedTuple):
    language: str
    confident: bool


def detect_language(raw: str) -> LanguageGuess:
    """Stopword-profile scoring; ties and zero hits fall back to English.

    A zero-hit text is flagged not-confident rather than raising, since the
    routing layer must still pick a model.
    """
    tokens = [t for t in "".join(c if c.isalnum() else " " for c in raw.lower()).split() if t]
    if not tokens:
        return LanguageGuess("en", False)
    scores = {lang: sum(1 for t in tokens if t in STOPWORDS[lang]) for lang in LANGUAGES}
    best = max(LANGUAGES, key=lambda lang: scores[lang])  # tie -> earliest: en > pt > es
    if scores[best] == 0:
        return LanguageGuess("en", False)
    return LanguageGuess(best, True)
