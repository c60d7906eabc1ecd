"""Word lists and unique-name generators for synthetic entities."""

from __future__ import annotations

import random

from ..similarity import normalize

FIRST_NAMES = """Ada Alan Alice Amara Anton Aria Arthur Beatrix Bruno Camila Carlos Cecile Clara Conrad Dalia
Daniel Dmitri Edith Elena Elias Emil Esther Felix Flora Franco Greta Hana Hector Helena Hugo Ida Igor Ines
Isaac Ivan Jana Jonas Julia Kai Karla Lars Lena Leon Lidia Lorenzo Lucia Magnus Maja Marco Marta Milan Mira
Nadia Nils Nora Oskar Paula Pavel Petra Quinn Rafael Rosa Ruben Sara Selma Silas Sofia Stefan Tamara Teo
Thea Tobias Ulla Vera Viktor Wanda Yara Yusuf Zora""".split()

LAST_NAMES = """Abbott Alcott Almeida Andersen Arden Bakker Barros Becker Bellamy Berger Blackwood Brandt
Calloway Castell Chandler Cordova Crane Dalton Delacroix Draper Eastwood Ellery Falk Fenwick Fischer Foster
Garland Gray Halvorsen Harlow Hartmann Holloway Ingram Ivers Jansen Keller Kendrick Kowalski Lambert Larsen
Lindqvist Lowell Marsh Mendez Moreau Novak Okafor Olsen Ortega Pike Quill Ramsey Reyes Rinaldi Rowe Salazar
Santos Sawyer Schulz Sinclair Strand Sutter Tanaka Thorne Toivonen Underwood Valdez Vance Varga Wagner
Whitlock Winter Wolfe Yamada Zeller""".split()

ADJECTIVES = """Amber Ashen Bitter Bright Broken Burning Calm Crimson Crooked Dark Distant Drifting Electric
Empty Endless Fading Fallen Forgotten Frozen Gentle Gilded Golden Hidden Hollow Iron Last Lonely Lost Lunar
Midnight Narrow Painted Pale Quiet Restless Rising Scarlet Secret Shattered Silent Silver Sleeping Stolen
Sudden Sunken Velvet Wandering Wild Winter Wooden""".split()

NOUNS = """Anchor Archive Avenue Ballad Bridge Canyon Carnival Cathedral Citadel Compass Corridor Country
Crossing Current Desert Dream Echo Embassy Empire Engine Frontier Garden Glacier Harbor Horizon Island
Journey Kingdom Labyrinth Lantern Letter Lighthouse Machine Meadow Mirror Monsoon Mountain Orchard Palace
Passage Pilgrim Prairie Promise Quarry Railway River Shadow Signal Sparrow Station Summer Tide Tower Valley
Voyage Whisper""".split()

COMPANY_WORDS = """Apex Aurora Beacon Bluebird Cascade Cinder Cobalt Condor Crescent Delta Ember Falcon
Fjord Granite Harbinger Helix Juniper Keystone Lark Magnolia Meridian Monarch Nimbus Northstar Oak Onyx
Orbit Paragon Pinnacle Prism Quasar Raven Redwood Sable Sequoia Solstice Spire Summit Tandem Thistle Topaz
Vanguard Vertex Willow Zenith""".split()

COMPANY_SUFFIXES = ["Pictures", "Studios", "Films", "Entertainment", "Media", "Productions"]

CITIES = """Amsterdam Athens Barcelona Berlin Bogota Boston Brussels Budapest Cairo Chicago Copenhagen Dublin
Edinburgh Florence Geneva Hamburg Helsinki Istanbul Kyoto Lagos Lisbon London Lyon Madrid Manila Melbourne
Milan Montreal Mumbai Munich Naples Oslo Paris Prague Rome Santiago Seoul Stockholm Sydney Toronto Vienna
Warsaw Zurich""".split()

COUNTRIES = ["United States", "United Kingdom", "France", "Germany", "Italy", "Spain", "Japan", "Canada", "Sweden", "Brazil"]
LANGUAGES = ["English", "French", "German", "Italian", "Spanish", "Japanese", "Swedish", "Portuguese"]
NATIONALITIES = ["American", "British", "French", "German", "Italian", "Spanish", "Japanese", "Canadian", "Swedish", "Brazilian"]
GENRES = ["Drama", "Comedy", "Thriller", "Horror", "Romance", "Western", "Documentary", "Adventure", "Mystery", "War", "Musical", "Fantasy"]
OCCUPATIONS = ["Actor", "Director", "Producer", "Screenwriter", "Composer", "Cinematographer"]
INDUSTRIES = ["Film", "Entertainment", "Media", "Television", "Distribution"]


class UniqueNames:
    """Hands out names that are distinct after normalization, across all generators."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.taken: set = set()

    def _claim(self, name: str) -> bool:
        key = normalize(name)
        stripped = key[4:] if key.startswith("the ") else key
        if key in self.taken or stripped in self.taken:
            return False
        self.taken.update((key, stripped))
        return True

    def _draw(self, make, widen) -> str:
        for _ in range(30):
            name = make()
            if self._claim(name):
                return name
        while True:
            name = widen(make())
            if self._claim(name):
                return name

    def person(self) -> str:
        r = self.rng
        return self._draw(
            lambda: f"{r.choice(FIRST_NAMES)} {r.choice(LAST_NAMES)}",
            lambda n: f"{n}-{r.choice(LAST_NAMES)}",  # hyphenated double surname
        )

    def film(self) -> str:
        r = self.rng

        def make():
            form = r.randrange(4)
            if form == 0:
                return f"{r.choice(ADJECTIVES)} {r.choice(NOUNS)}"
            if form == 1:
                return f"The {r.choice(ADJECTIVES)} {r.choice(NOUNS)}"
            if form == 2:
                return f"{r.choice(NOUNS)} of the {r.choice(NOUNS)}"
            return f"The {r.choice(NOUNS)} {r.choice(NOUNS)}"

        return self._draw(make, lambda n: f"{n} {r.choice(NOUNS)}")

    def company(self) -> str:
        r = self.rng
        return self._draw(
            lambda: f"{r.choice(COMPANY_WORDS)} {r.choice(COMPANY_SUFFIXES)}",
            lambda n: f"{r.choice(COMPANY_WORDS)} {n}",
        )
