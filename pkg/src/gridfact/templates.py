"""Prompt templates for the hosted-model extraction and refinement backends.

Each template carries an id and a version; both participate in the response
cache key, so editing a template (and bumping its version) invalidates only
its own cached responses.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    version: str
    system: str
    user: str

    def render(self, **fields) -> str:
        return self.user.format(**fields)


EXTRACT = PromptTemplate(
    id="extract",
    version="1",
    system=(
        "You turn prose into flat facts. Reply with a JSON array only - no "
        "prose, no code fences."
    ),
    user=(
        "Read the passage below and list every concrete fact it states about "
        "a named entity as an object with keys \"subject\", \"predicate\", "
        "and \"object\".\n"
        "Rules:\n"
        "- subject: the entity the fact is about, as named in the passage.\n"
        "- predicate: the attribute or relation being stated, a short noun "
        "phrase.\n"
        "- object: the stated value, copied verbatim including units, "
        "currency symbols, and percent signs.\n"
        "- One object per fact; split conjunctions into separate facts.\n"
        "- Skip opinions, hedges, and facts without a clear subject.\n"
        "- If the passage states no facts, reply with [].\n"
        "\n"
        "Passage:\n"
        "{text}\n"
    ),
)


REFINE = PromptTemplate(
    id="refine",
    version="1",
    system=(
        "You match facts that mean the same thing despite different wording. "
        "Reply with a JSON array only - no prose, no code fences."
    ),
    user=(
        "Two numbered lists of facts follow. List A comes from a table, list "
        "B from a source text. Some entries describe the same real-world "
        "fact under different names, spellings, or phrasings.\n"
        "Reply with a JSON array of [a_index, b_index] pairs, using the "
        "0-based numbers shown, pairing each list-A entry with the list-B "
        "entry it restates. Pair entries only when subject and attribute "
        "clearly refer to the same thing; never pair two entries just "
        "because their values look alike. Each index may appear at most "
        "once. If nothing matches, reply with [].\n"
        "\n"
        "List A (from the table):\n"
        "{table_facts}\n"
        "\n"
        "List B (from the source text):\n"
        "{source_facts}\n"
    ),
)
