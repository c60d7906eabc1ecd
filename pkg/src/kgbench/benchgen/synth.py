"""Synthesis of the reference movie graph."""

from __future__ import annotations

import datetime as _dt
import random
from dataclasses import dataclass, field

from ..namespaces import RDF_TYPE, RDFS_LABEL, RESOURCE_NS, XSD_DATE, XSD_DOUBLE, XSD_INTEGER, XSD_STRING
from ..rdf import Iri, Literal, Triple
from . import names as N
from .ontology_def import COMPANY, FILM, PERSON, o

# film relation -> (min, max) number of values
FILM_RELATIONS = {
    "director": (1, 2),
    "starring": (2, 5),
    "producer": (1, 2),
    "writer": (1, 2),
    "musicComposer": (0, 1),
    "cinematography": (0, 1),
    "productionCompany": (1, 2),
    "distributor": (0, 1),
}
PERSON_RELATIONS = ("director", "starring", "producer", "writer", "musicComposer", "cinematography")
COMPANY_RELATIONS = ("productionCompany", "distributor")


@dataclass
class Entity:
    iri: str
    cls: str
    label: str
    attrs: dict = field(default_factory=dict)  # local property name -> list of (lexical, datatype)
    rels: dict = field(default_factory=dict)  # local property name -> list of entity IRIs

    def triples(self) -> list[Triple]:
        s = Iri(self.iri)
        out = [Triple(s, Iri(RDF_TYPE), Iri(self.cls)), Triple(s, Iri(RDFS_LABEL), Literal(self.label))]
        for name, values in self.attrs.items():
            out += [Triple(s, Iri(o(name)), Literal(lex, dt)) for lex, dt in values]
        for name, targets in self.rels.items():
            out += [Triple(s, Iri(o(name)), Iri(t)) for t in targets]
        return out


def _iri(label: str) -> str:
    return RESOURCE_NS + label.replace(" ", "_")


def _date(rng: random.Random, start: int, end: int) -> str:
    first = _dt.date(start, 1, 1).toordinal()
    last = _dt.date(end, 12, 31).toordinal()
    return _dt.date.fromordinal(rng.randint(first, last)).isoformat()


def _money(rng: random.Random, lo: int, hi: int) -> str:
    return repr(float(rng.randint(lo, hi) * 100_000))


@dataclass
class ReferenceData:
    films: list
    persons: dict  # iri -> Entity
    companies: dict

    def entity(self, iri: str) -> Entity:
        if iri in self.persons:
            return self.persons[iri]
        if iri in self.companies:
            return self.companies[iri]
        return next(f for f in self.films if f.iri == iri)

    def related(self, film: Entity) -> list[str]:
        return sorted({t for targets in film.rels.values() for t in targets})


def synthesize(n_films: int, rng: random.Random) -> ReferenceData:
    """Films with sampled facts; persons and companies drawn from shared pools."""
    names = N.UniqueNames(rng)
    n_persons = max(12, int(n_films * 1.6))
    n_companies = max(6, n_films // 8)
    persons = {}
    for _ in range(n_persons):
        label = names.person()
        e = Entity(_iri(label), PERSON, label)
        born = int(_date(rng, 1925, 1995)[:4])
        e.attrs["birthDate"] = [(_date(rng, born, born), XSD_DATE)]
        if born < 1960 and rng.random() < 0.3:
            e.attrs["deathDate"] = [(_date(rng, born + 45, min(born + 90, 2023)), XSD_DATE)]
        e.attrs["birthPlace"] = [(rng.choice(N.CITIES), XSD_STRING)]
        e.attrs["nationality"] = [(rng.choice(N.NATIONALITIES), XSD_STRING)]
        e.attrs["occupation"] = [(x, XSD_STRING) for x in sorted(rng.sample(N.OCCUPATIONS, rng.randint(1, 2)))]
        persons[e.iri] = e
    companies = {}
    for _ in range(n_companies):
        label = names.company()
        e = Entity(_iri(label), COMPANY, label)
        e.attrs["foundingDate"] = [(_date(rng, 1905, 2015), XSD_DATE)]
        e.attrs["headquarters"] = [(rng.choice(N.CITIES), XSD_STRING)]
        e.attrs["industry"] = [(rng.choice(N.INDUSTRIES), XSD_STRING)]
        companies[e.iri] = e

    person_pool = sorted(persons)
    company_pool = sorted(companies)
    films = []
    for _ in range(n_films):
        label = names.film()
        f = Entity(_iri(label), FILM, label)
        f.attrs["releaseDate"] = [(_date(rng, 1950, 2023), XSD_DATE)]
        f.attrs["runtime"] = [(str(rng.randint(78, 185)), XSD_INTEGER)]
        if rng.random() < 0.85:
            f.attrs["budget"] = [(_money(rng, 5, 2000), XSD_DOUBLE)]
        if rng.random() < 0.85:
            f.attrs["gross"] = [(_money(rng, 1, 8000), XSD_DOUBLE)]
        f.attrs["genre"] = [(g, XSD_STRING) for g in sorted(rng.sample(N.GENRES, rng.randint(1, 3)))]
        f.attrs["language"] = [(rng.choice(N.LANGUAGES), XSD_STRING)]
        f.attrs["country"] = [(rng.choice(N.COUNTRIES), XSD_STRING)]
        for rel, (lo, hi) in FILM_RELATIONS.items():
            k = rng.randint(lo, hi)
            if k == 0:
                continue
            pool = company_pool if rel in COMPANY_RELATIONS else person_pool
            f.rels[rel] = sorted(rng.sample(pool, k))
        films.append(f)

    used = {t for f in films for ts in f.rels.values() for t in ts}
    persons = {k: v for k, v in persons.items() if k in used}
    companies = {k: v for k, v in companies.items() if k in used}
    return ReferenceData(films, persons, companies)
