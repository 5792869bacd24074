"""Synthetic commenter identities.

A comment's display name is a seeded uniform pick from the name pool, keyed
on (pool seed, comment_id) so reruns reproduce it.  The avatar seed is a
content hash of the comment_id alone: unique per comment, stable forever,
and renderable into an icon by any deterministic seed-to-image function.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from audiencesim.errors import InputError
from audiencesim.comments.model import IdentityPool

# Starter pool of common given names; production deployments can load a
# larger file with load_name_file.
DEFAULT_NAMES: tuple[str, ...] = (
    "Aaron", "Abigail", "Adam", "Adrian", "Aiden", "Alan", "Albert", "Alex",
    "Alice", "Allison", "Amanda", "Amber", "Amelia", "Amy", "Andrea",
    "Andrew", "Angela", "Anna", "Anthony", "April", "Aria", "Ariana",
    "Arthur", "Ashley", "Aubrey", "Austin", "Ava", "Avery", "Bailey",
    "Barbara", "Beau", "Becky", "Bella", "Benjamin", "Beth", "Blake",
    "Bonnie", "Bradley", "Brandon", "Brenda", "Brian", "Brianna", "Brooke",
    "Bryan", "Caleb", "Cameron", "Carl", "Carla", "Carlos", "Carmen",
    "Carol", "Caroline", "Carter", "Casey", "Catherine", "Chad", "Charles",
    "Charlotte", "Chase", "Chelsea", "Cheryl", "Chloe", "Chris", "Christina",
    "Christopher", "Claire", "Clara", "Cody", "Cole", "Colin", "Connor",
    "Courtney", "Craig", "Crystal", "Cynthia", "Daisy", "Dakota", "Dale",
    "Daniel", "Danielle", "David", "Dawn", "Dean", "Deborah", "Dennis",
    "Derek", "Diana", "Diane", "Dominic", "Donald", "Donna", "Dorothy",
    "Douglas", "Dylan", "Edward", "Elena", "Eli", "Elijah", "Elizabeth",
    "Ella", "Ellie", "Emily", "Emma", "Eric", "Erica", "Erin", "Ethan",
    "Eugene", "Eva", "Evan", "Evelyn", "Faith", "Felix", "Fiona", "Frances",
    "Frank", "Gabriel", "Gabriella", "Gary", "Gavin", "George", "Gerald",
    "Grace", "Gregory", "Hailey", "Hannah", "Harold", "Harper", "Harry",
    "Hazel", "Heather", "Helen", "Henry", "Holly", "Hunter", "Ian",
    "Isaac", "Isabella", "Ivy", "Jack", "Jacob", "Jade", "James", "Jamie",
    "Janet", "Jason", "Jasmine", "Jeffrey", "Jennifer", "Jeremy", "Jesse",
    "Jessica", "Joan", "Joanna", "Joel", "John", "Jonathan", "Jordan",
    "Joseph", "Joshua", "Joyce", "Juan", "Judith", "Julia", "Julian",
    "Justin", "Kaitlyn", "Karen", "Kate", "Katherine", "Kathleen", "Kayla",
    "Keith", "Kelly", "Kenneth", "Kevin", "Kimberly", "Kyle", "Landon",
    "Larry", "Laura", "Lauren", "Lawrence", "Leah", "Leo", "Leonard",
    "Leslie", "Levi", "Liam", "Lillian", "Lily", "Linda", "Lisa", "Logan",
    "Lucas", "Lucy", "Luke", "Lydia", "Madison", "Marcus", "Margaret",
    "Maria", "Marie", "Marilyn", "Mark", "Martha", "Martin", "Mary",
    "Mason", "Matthew", "Maya", "Megan", "Melanie", "Melissa", "Michael",
    "Michelle", "Mila", "Miles", "Molly", "Monica", "Morgan", "Nancy",
    "Naomi", "Natalie", "Nathan", "Nicholas", "Nicole", "Noah", "Nora",
    "Norman", "Oliver", "Olivia", "Oscar", "Owen", "Paige", "Pamela",
    "Patricia", "Patrick", "Paul", "Paula", "Penelope", "Peter", "Philip",
    "Phillip", "Phoebe", "Rachel", "Ralph", "Randy", "Raymond", "Rebecca",
    "Regina", "Richard", "Riley", "Robert", "Roger", "Ronald", "Rose",
    "Roy", "Russell", "Ruth", "Ryan", "Sabrina", "Samantha", "Samuel",
    "Sandra", "Sara", "Sarah", "Scott", "Sean", "Sebastian", "Seth",
    "Shane", "Shannon", "Sharon", "Shawn", "Shirley", "Sierra", "Simon",
    "Sophia", "Sophie", "Spencer", "Stella", "Stephanie", "Stephen",
    "Steven", "Susan", "Sydney", "Tanner", "Tara", "Taylor", "Teresa",
    "Terry", "Theodore", "Thomas", "Tiffany", "Timothy", "Tina", "Todd",
    "Travis", "Trevor", "Tristan", "Tyler", "Valerie", "Vanessa", "Victor",
    "Victoria", "Vincent", "Violet", "Virginia", "Walter", "Wayne",
    "Wendy", "Wesley", "William", "Willie", "Wyatt", "Xavier", "Zachary",
    "Zoe",
)


def assign_identity(pool: IdentityPool, comment_id: str) -> tuple[str, str]:
    """Deterministic (author_name, avatar_seed) for one comment."""
    if not comment_id.strip():
        raise InputError("comment_id must be nonempty")
    digest = hashlib.sha256(
        f"{pool.rng_seed}:{comment_id}".encode("utf-8")
    ).digest()
    index = int.from_bytes(digest[:8], "big") % len(pool.names)
    return pool.names[index], avatar_seed_for(comment_id)


def avatar_seed_for(comment_id: str) -> str:
    """Stable 16-hex-digit avatar seed; distinct comment_ids get distinct
    seeds (collision odds are negligible at this length)."""
    return hashlib.sha256(f"avatar:{comment_id}".encode("utf-8")).hexdigest()[:16]


def load_name_file(path: str | Path) -> tuple[str, ...]:
    """One name per line; duplicates collapse, order preserved."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"name file not found: {path}")
    names: list[str] = []
    seen = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        name = line.strip()
        if name and name not in seen:
            seen.add(name)
            names.append(name)
    if not names:
        raise InputError(f"name file is empty: {path}")
    return tuple(names)
