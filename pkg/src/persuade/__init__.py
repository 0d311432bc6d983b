"""Automated persuasion dialogues over typed bipolar argument graphs.

The package splits along the classic automated-persuasion-system components:
a domain model (argmodel + contextengine + topicindex), a user model
(usermodel), a protocol (dialogue), a move-selection strategy (strategy),
bundled case-study graphs (corpus), and a session service plus CLI on top.
"""

__version__ = "0.1.0"
