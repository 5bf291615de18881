use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use anyhow::{Context, Result};
use chainlab::games::{bg_step, ef_step, Arena, BgGame, BgMove, BgPosition, EfGame, EfMove, EfPosition, Player, Side};

use crate::args::{PlayCmd, Role};
use crate::load::GameModel;

const HELP: &str = "commands: move ..., show, hint, resign, help
  EF, as I:   move left|right <elements>
  EF, as II:  move <images, in challenge order>
  BG, as I:   move <clock> <elements>
  BG, as II:  move <elem>:<offset> ... <left>=<right> ...
elements are names or indices";

/// One game the REPL drives. The human plays `human`; the solver the other side.
trait Session {
    fn show(&self) -> String;
    fn to_move(&self) -> Option<Player>;
    /// Whether the player to move has any legal move.
    fn can_move(&mut self) -> bool;
    fn apply(&mut self, tokens: &[&str]) -> Result<String, String>;
    /// The solver's move for whoever is to move, applied.
    fn solver_move(&mut self) -> String;
    fn hint(&mut self) -> String;
}

fn player(role: Role) -> Player {
    match role {
        Role::I => Player::I,
        Role::Ii => Player::II,
    }
}

fn other(p: Player) -> Player {
    match p {
        Player::I => Player::II,
        Player::II => Player::I,
    }
}

fn element(arena: &Arena, token: &str) -> Result<usize, String> {
    if let Some(i) = (0..arena.size()).find(|&i| arena.name(i) == token) {
        return Ok(i);
    }
    token.parse::<usize>().ok().filter(|&i| i < arena.size()).ok_or_else(|| format!("no element `{token}`"))
}

struct Ef<'g, 'a> {
    game: EfGame<'g, 'a>,
    left: &'g Arena<'a>,
    right: &'g Arena<'a>,
    pos: EfPosition,
}

impl Ef<'_, '_> {
    fn arena(&self, side: Side) -> &Arena<'_> {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    fn step(&mut self, mv: &EfMove) -> Result<String, String> {
        let text = match mv {
            EfMove::Challenge { side, set } => format!("I plays {}", self.game.render_move(*side, set)),
            EfMove::Respond { images } => {
                let (side, _) = self.pos.pending.clone().expect("II answers a pending challenge");
                format!("II answers {}", self.game.render_move(side.other(), images))
            }
        };
        self.pos = ef_step(self.left, self.right, &self.pos, mv).map_err(|e| e.reason)?;
        Ok(text)
    }

    fn images(&self, iso_after: &chainlab::games::PartialIso) -> Vec<usize> {
        let (side, set) = self.pos.pending.clone().expect("pending");
        set.iter()
            .map(|&e| match side {
                Side::Left => iso_after.image(e).expect("answered"),
                Side::Right => iso_after.preimage(e).expect("answered"),
            })
            .collect()
    }
}

impl Session for Ef<'_, '_> {
    fn show(&self) -> String {
        let mut s = format!("rounds left={} g={}", self.pos.rounds, self.game.render(&self.pos.iso));
        if let Some((side, set)) = &self.pos.pending {
            s.push_str(&format!(" pending={}", self.game.render_move(*side, set)));
        }
        s
    }

    fn to_move(&self) -> Option<Player> {
        self.pos.to_move()
    }

    fn can_move(&mut self) -> bool {
        match &self.pos.pending {
            None => !self.game.challenges(&self.pos.iso).is_empty(),
            Some((side, set)) => !self.game.responses(&self.pos.iso, *side, set).is_empty(),
        }
    }

    fn apply(&mut self, tokens: &[&str]) -> Result<String, String> {
        let mv = match &self.pos.pending {
            None => {
                let (side, rest) = match tokens.split_first() {
                    Some((&"left", rest)) => (Side::Left, rest),
                    Some((&"right", rest)) => (Side::Right, rest),
                    _ => return Err("expected `move left|right <elements>`".into()),
                };
                let set = rest.iter().map(|t| element(self.arena(side), t)).collect::<Result<Vec<_>, _>>()?;
                if set.iter().any(|&e| self.pos.iso.covers(side, e)) {
                    return Err("element already covered".into());
                }
                EfMove::Challenge { side, set }
            }
            Some((side, _)) => {
                let target = side.other();
                let images = tokens.iter().map(|t| element(self.arena(target), t)).collect::<Result<Vec<_>, _>>()?;
                EfMove::Respond { images }
            }
        };
        self.step(&mv)
    }

    fn solver_move(&mut self) -> String {
        let mv = match self.pos.pending.clone() {
            None => {
                let (side, set) = self
                    .game
                    .winning_challenge(&self.pos.iso, self.pos.rounds)
                    .or_else(|| self.game.challenges(&self.pos.iso).into_iter().next())
                    .expect("caller checked can_move");
                EfMove::Challenge { side, set }
            }
            Some((side, set)) => {
                let iso = self
                    .game
                    .winning_response(&self.pos.iso, self.pos.rounds, side, &set)
                    .or_else(|| self.game.responses(&self.pos.iso, side, &set).into_iter().next())
                    .expect("caller checked can_move");
                EfMove::Respond { images: self.images(&iso) }
            }
        };
        self.step(&mv).expect("solver moves are legal")
    }

    fn hint(&mut self) -> String {
        match self.pos.pending.clone() {
            None => match self.game.winning_challenge(&self.pos.iso, self.pos.rounds) {
                Some((side, set)) => format!("winning: move {side} {}", names(self.arena(side), &set)),
                None => "no winning challenge: II survives every one".into(),
            },
            Some((side, set)) => match self.game.winning_response(&self.pos.iso, self.pos.rounds, side, &set) {
                Some(iso) => format!("winning: move {}", names(self.arena(side.other()), &self.images(&iso))),
                None => "no winning answer: I wins against every one".into(),
            },
        }
    }
}

fn names(arena: &Arena, set: &[usize]) -> String {
    set.iter().map(|&e| arena.name(e)).collect::<Vec<_>>().join(" ")
}

struct Bg<'g, 'a> {
    game: BgGame<'g, 'a>,
    a: &'g Arena<'a>,
    b: &'g Arena<'a>,
    pos: BgPosition,
}

impl Bg<'_, '_> {
    fn arena(&self, side: Side) -> &Arena<'_> {
        match side {
            Side::Left => self.a,
            Side::Right => self.b,
        }
    }

    fn step(&mut self, mv: &BgMove) -> Result<String, String> {
        let who = match mv {
            BgMove::Challenge { .. } => "I",
            BgMove::Respond { .. } => "II",
        };
        let text = format!("{who} plays {}", self.game.render_move(&self.pos, mv));
        self.pos = bg_step(self.a, self.b, &self.pos, mv).map_err(|e| e.reason)?;
        Ok(text)
    }

    fn syntax(&self, mv: &BgMove) -> String {
        let side = self.pos.side();
        match mv {
            BgMove::Challenge { clock, set } => format!("move {clock} {}", names(self.arena(side), set)),
            BgMove::Respond { h, extend } => {
                let mut parts: Vec<String> =
                    h.iter().map(|(&e, &v)| format!("{}:{v}", self.arena(side).name(e))).collect();
                parts.extend(extend.iter().map(|&(x, y)| format!("{}={}", self.a.name(x), self.b.name(y))));
                format!("move {}", parts.join(" "))
            }
        }
    }
}

impl Session for Bg<'_, '_> {
    fn show(&self) -> String {
        let mut s = self.game.render_position(&self.pos);
        if let Some((clock, set)) = &self.pos.pending {
            let mv = BgMove::Challenge { clock: *clock, set: set.clone() };
            s.push_str(&format!(" pending={}", self.game.render_move(&self.pos, &mv)));
        }
        s
    }

    fn to_move(&self) -> Option<Player> {
        self.pos.to_move()
    }

    fn can_move(&mut self) -> bool {
        match self.pos.pending {
            None => !self.game.challenges(&self.pos).is_empty(),
            Some(_) => !self.game.responses(&self.pos).is_empty(),
        }
    }

    fn apply(&mut self, tokens: &[&str]) -> Result<String, String> {
        let side = self.pos.side();
        let mv = match self.pos.pending {
            None => {
                let (clock, rest) = tokens.split_first().ok_or("expected `move <clock> <elements>`")?;
                let clock = clock.parse().map_err(|_| format!("clock `{clock}` is not a number"))?;
                let set = rest.iter().map(|t| element(self.arena(side), t)).collect::<Result<Vec<_>, _>>()?;
                BgMove::Challenge { clock, set }
            }
            Some(_) => {
                let mut h = BTreeMap::new();
                let mut extend = Vec::new();
                for t in tokens {
                    if let Some((e, v)) = t.split_once(':') {
                        let v = v.parse().map_err(|_| format!("offset `{v}` is not a number"))?;
                        h.insert(element(self.arena(side), e)?, v);
                    } else if let Some((x, y)) = t.split_once('=') {
                        extend.push((element(self.a, x)?, element(self.b, y)?));
                    } else {
                        return Err(format!("`{t}` is neither elem:offset nor left=right"));
                    }
                }
                BgMove::Respond { h, extend }
            }
        };
        self.step(&mv)
    }

    fn solver_move(&mut self) -> String {
        let mv = match self.pos.pending {
            None => {
                self.game.winning_challenge(&self.pos).or_else(|| self.game.challenges(&self.pos).into_iter().next())
            }
            Some(_) => self.game.best_response(&self.pos),
        }
        .expect("caller checked can_move");
        self.step(&mv).expect("solver moves are legal")
    }

    fn hint(&mut self) -> String {
        match self.pos.pending {
            None => match self.game.winning_challenge(&self.pos) {
                Some(mv) => format!("winning: {}", self.syntax(&mv)),
                None => "no winning challenge: II survives every one".into(),
            },
            Some(_) => {
                let rs = self.game.responses(&self.pos);
                let first = rs.first().map(|r| r.0.clone());
                match rs.into_iter().find(|(_, next)| self.game.ii_wins(next)) {
                    Some((mv, _)) => format!("winning: {}", self.syntax(&mv)),
                    // Responses come most deferral first.
                    None => match first {
                        Some(mv) => format!("no winning answer; most deferral: {}", self.syntax(&mv)),
                        None => "no legal answer".into(),
                    },
                }
            }
        }
    }
}

/// Runs the loop until someone wins, resigns or input ends. Returns the winner, if any.
fn drive(
    session: &mut dyn Session,
    human: Player,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    log: &mut Vec<String>,
) -> Result<Option<Player>> {
    let say = |out: &mut dyn Write, log: &mut Vec<String>, line: String| -> Result<()> {
        writeln!(out, "{line}")?;
        log.push(line);
        Ok(())
    };
    say(out, log, format!("you play {human}; type `help` for commands"))?;
    say(out, log, session.show())?;
    loop {
        let Some(mover) = session.to_move() else {
            say(out, log, "game over: II wins".into())?;
            return Ok(Some(Player::II));
        };
        if !session.can_move() {
            let w = other(mover);
            say(out, log, format!("{mover} has no legal move: {w} wins"))?;
            return Ok(Some(w));
        }
        if mover != human {
            let text = session.solver_move();
            say(out, log, text)?;
            say(out, log, session.show())?;
            continue;
        }
        write!(out, "{human}> ")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            say(out, log, "input ended".into())?;
            return Ok(None);
        }
        log.push(format!("{human}> {}", line.trim()));
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.split_first() {
            None => {}
            Some((&"help", _)) => say(out, log, HELP.into())?,
            Some((&"show", _)) => say(out, log, session.show())?,
            Some((&"hint", _)) => {
                let h = session.hint();
                say(out, log, h)?;
            }
            Some((&"resign", _)) => {
                let w = other(human);
                say(out, log, format!("{human} resigns: {w} wins"))?;
                return Ok(Some(w));
            }
            Some((&"move", rest)) => match session.apply(rest) {
                Ok(text) => {
                    say(out, log, text)?;
                    say(out, log, session.show())?;
                }
                Err(reason) => say(out, log, format!("illegal: {reason}; try again"))?,
            },
            Some((cmd, _)) => say(out, log, format!("unknown command `{cmd}`; type `help`"))?,
        }
    }
}

fn write_transcript(path: &Path, log: &[String]) -> Result<()> {
    let mut text = log.join("\n");
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing transcript {}", path.display()))
}

/// Plays on `input`, echoing to `out`, and writes the transcript on exit.
pub fn run(cmd: &PlayCmd, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<u8> {
    let mut log = Vec::new();
    let (path, result) = match cmd {
        PlayCmd::Ef { left, right, rounds, cap, role, transcript } => {
            let (l, r) = (GameModel::read(left)?, GameModel::read(right)?);
            let (la, ra) = (l.arena(), r.arena());
            let game = EfGame::new(&la, &ra, *cap)?;
            let pos = EfPosition::start(game.base().clone(), *rounds, *cap);
            let mut s = Ef { game, left: &la, right: &ra, pos };
            (transcript, drive(&mut s, player(*role), input, out, &mut log))
        }
        PlayCmd::Bg { left, right, beta, theta, role, transcript } => {
            let (l, r) = (GameModel::read(left)?, GameModel::read(right)?);
            let (la, ra) = (l.arena(), r.arena());
            let game = BgGame::new(&la, &ra, *beta, *theta)?;
            let pos = game.start();
            let mut s = Bg { game, a: &la, b: &ra, pos };
            (transcript, drive(&mut s, player(*role), input, out, &mut log))
        }
    };
    write_transcript(path, &log)?;
    result?;
    Ok(0)
}
