# catlab: herbruikbaarheid van katalysatoren bij distillatie en teleportatie
