"""Bundled synthetic corpora and CSV ingestion.

The synthetic generator produces seeded, balanced, mildly-noisy corpora in
all three languages for tests and quality gates; no external datasets are
required.  The CSV loader accepts the text,label[,language] shape and an
optional mapping file collapsing finer label schemes to binary.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from sentry.hatespeech.normalize import Document, normalize_text

_HATE_WORDS = {
    "en": ["vermin", "scum", "filth", "parasites", "degenerates", "subhumans"],
    "pt": ["escória", "vermes", "parasitas", "imundos", "desprezíveis"],
    "es": ["escoria", "alimañas", "parásitos", "inmundos", "despreciables"],
}

_HATE_TEMPLATES = {
    "en": [
        "those {group} people are {hate} and should leave",
        "the {group} crowd is nothing but {hate}",
        "we must remove the {hate} {group} lot from here",
        "all of them are {hate} do not trust the {group} ones",
        "that {group} bunch behaves like {hate} every single day",
    ],
    "pt": [
        "aquele pessoal {group} é {hate} e devia sumir",
        "a turma {group} não passa de {hate}",
        "temos que tirar esses {hate} {group} daqui",
        "todos eles são {hate} não confie no grupo {group}",
    ],
    "es": [
        "esa gente {group} es {hate} y debería irse",
        "el grupo {group} no es más que {hate}",
        "hay que sacar a esos {hate} {group} de aquí",
        "todos ellos son {hate} no confíes en los {group}",
    ],
}

_BENIGN_TEMPLATES = {
    "en": [
        "the {thing} for the {group} team is ready for review",
        "please join the {thing} about the new {group} project",
        "great progress on the {thing} this week thanks everyone",
        "reminder the {group} {thing} moved to friday afternoon",
        "can you share the {thing} notes with the {group} office",
    ],
    "pt": [
        "o {thing} da equipe {group} está pronto para revisão",
        "participe do {thing} sobre o novo projeto {group}",
        "ótimo progresso no {thing} desta semana obrigado a todos",
        "lembrete o {thing} do grupo {group} mudou para sexta",
    ],
    "es": [
        "el {thing} del equipo {group} está listo para revisión",
        "únete al {thing} sobre el nuevo proyecto {group}",
        "gran progreso en el {thing} de esta semana gracias a todos",
        "recordatorio el {thing} del grupo {group} pasó al viernes",
    ],
}

_AMBIGUOUS_TEMPLATES = {
    "en": [
        "i am tired of the {group} office drama",
        "the {group} situation got worse again",
        "nobody wants another argument with the {group} side",
    ],
    "pt": [
        "estou cansado do drama do pessoal {group}",
        "a situação {group} piorou de novo",
        "ninguém quer outra discussão com o lado {group}",
    ],
    "es": [
        "estoy cansado del drama de la gente {group}",
        "la situación {group} empeoró otra vez",
        "nadie quiere otra discusión con el lado {group}",
    ],
}

_GROUPS = {
    "en": ["northern", "downtown", "visiting", "remote", "new"],
    "pt": ["do norte", "do centro", "visitante", "remoto", "novo"],
    "es": ["del norte", "del centro", "visitante", "remoto", "nuevo"],
}

_THINGS = {
    "en": ["report", "meeting", "budget", "launch", "deploy", "review"],
    "pt": ["relatório", "encontro", "orçamento", "lançamento", "painel"],
    "es": ["informe", "encuentro", "presupuesto", "lanzamiento", "panel"],
}


def synthetic_corpus(language: str, n: int = 600, seed: int = 7) -> list[Document]:
    """Balanced labeled corpus of n documents, deterministic per seed."""
    rng = np.random.default_rng(seed + {"en": 0, "pt": 1000, "es": 2000}[language])
    docs: list[Document] = []
    n_hate = n // 2
    for i in range(n):
        label = 1 if i < n_hate else 0
        group = _GROUPS[language][int(rng.integers(0, len(_GROUPS[language])))]
        if rng.random() < 0.08:
            # ambiguous slice shared by both classes: irreducible error
            tmpl = _AMBIGUOUS_TEMPLATES[language][
                int(rng.integers(0, len(_AMBIGUOUS_TEMPLATES[language])))
            ]
            text = tmpl.format(group=group)
        elif label == 1:
            tmpl = _HATE_TEMPLATES[language][int(rng.integers(0, len(_HATE_TEMPLATES[language])))]
            text = tmpl.format(
                group=group,
                hate=_HATE_WORDS[language][int(rng.integers(0, len(_HATE_WORDS[language])))],
            )
        else:
            tmpl = _BENIGN_TEMPLATES[language][int(rng.integers(0, len(_BENIGN_TEMPLATES[language])))]
            text = tmpl.format(
                group=group,
                thing=_THINGS[language][int(rng.integers(0, len(_THINGS[language])))],
            )
        # sprinkle a shared filler token so classes overlap a little
        if rng.random() < 0.3:
            text += " today"
        docs.append(normalize_text(text, language, label=label))
    order = rng.permutation(n)
    return [docs[i] for i in order]


def sample_hateful_phrase(language: str = "en", seed: int = 7) -> str:
    """A raw phrase the synthetic-corpus models will flag."""
    rng = np.random.default_rng(seed)
    tmpl = _HATE_TEMPLATES[language][int(rng.integers(0, len(_HATE_TEMPLATES[language])))]
    return tmpl.format(group=_GROUPS[language][0], hate=_HATE_WORDS[language][0])


def sample_benign_phrase(language: str = "en", seed: int = 7) -> str:
    rng = np.random.default_rng(seed)
    tmpl = _BENIGN_TEMPLATES[language][int(rng.integers(0, len(_BENIGN_TEMPLATES[language])))]
    return tmpl.format(group=_GROUPS[language][0], thing=_THINGS[language][0])


def load_csv(
    path: str | Path,
    language: str | None = None,
    label_map: dict[str, int] | None = None,
) -> list[Document]:
    """Read text,label[,language] rows into normalized labeled documents.

    ``label_map`` (or a JSON file via load_label_map) collapses finer label
    schemes to the binary contract; without it labels must already be 0/1.
    """
    docs: list[Document] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "text" not in reader.fieldnames or "label" not in reader.fieldnames:
            raise ValueError(f"{path}: expected header with text,label columns")
        for row in reader:
            raw_label = (row["label"] or "").strip()
            if label_map is not None:
                if raw_label not in label_map:
                    raise ValueError(f"{path}: label {raw_label!r} missing from label map")
                label = int(label_map[raw_label])
            else:
                if raw_label not in ("0", "1"):
                    raise ValueError(f"{path}: label {raw_label!r} is not binary; provide a label map")
                label = int(raw_label)
            lang = (row.get("language") or language or "en").strip()
            docs.append(normalize_text(row["text"], lang, label=label))
    return docs


def load_label_map(path: str | Path) -> dict[str, int]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return {str(k): int(v) for k, v in doc.items()}


def write_csv(path: str | Path, docs: Sequence[Document]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["text", "label", "language"])
        for doc in docs:
            writer.writerow([doc.raw, doc.label, doc.language])
