//! An in-process message-passing harness standing in for a cluster of `p` ranks.
//!
//! Each rank runs an async program against its own [`RankContext`]. Ranks
//! interact only through point-to-point messages (reliable, per-sender FIFO)
//! and all-rank collectives. Two execution modes share the same contract:
//!
//! * [`ExecMode::Interleaved`] polls every rank round-robin on the calling
//!   thread. `recv`, `drain` and collectives are the only switch points, so
//!   a given program always produces the same schedule.
//! * [`ExecMode::Concurrent`] runs each rank on its own OS thread.
//!
//! A run fails with [`Error::Deadlock`] once every unfinished rank is blocked
//! in `recv` or a collective.

use std::collections::VecDeque;
use std::fmt;
use std::future::{poll_fn, Future};
use std::pin::{pin, Pin};
use std::str::FromStr;
use std::sync::{Arc, Mutex, MutexGuard};
use std::task::{Context, Poll, Wake, Waker};
use std::thread::{self, Thread};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::NodeId;

pub type Rank = usize;

/// What a message carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    /// A neighbor row `N_v` shipped by value.
    Data { node: NodeId, neighbors: Vec<NodeId> },
    /// Ask the owner of `node` for its row.
    Request { node: NodeId },
    /// Per-node triangle tallies for nodes owned by the receiver.
    Tallies { counts: Vec<(NodeId, u64)> },
    /// Completion notice; carries nothing.
    Control,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub src: Rank,
    pub payload: Payload,
}

/// Per-rank traffic counters. Data and request messages both count as data.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MessageStats {
    pub data_sent: u64,
    pub data_received: u64,
    pub control_sent: u64,
    pub control_received: u64,
    pub tallies_sent: u64,
    pub tallies_received: u64,
}

impl MessageStats {
    fn record(&mut self, payload: &Payload, sent: bool) {
        let slot = match (payload, sent) {
            (Payload::Data { .. } | Payload::Request { .. }, true) => &mut self.data_sent,
            (Payload::Data { .. } | Payload::Request { .. }, false) => &mut self.data_received,
            (Payload::Control, true) => &mut self.control_sent,
            (Payload::Control, false) => &mut self.control_received,
            (Payload::Tallies { .. }, true) => &mut self.tallies_sent,
            (Payload::Tallies { .. }, false) => &mut self.tallies_received,
        };
        *slot += 1;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ExecMode {
    #[default]
    Interleaved,
    Concurrent,
}

impl ExecMode {
    pub const ENV_VAR: &'static str = "TRIGRAPH_MODE";

    /// Reads `TRIGRAPH_MODE`; unset means interleaved.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(s) => s.parse(),
            Err(std::env::VarError::NotPresent) => Ok(ExecMode::Interleaved),
            Err(e) => Err(Error::invalid(format!("{}: {e}", Self::ENV_VAR))),
        }
    }
}

impl FromStr for ExecMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interleaved" => Ok(ExecMode::Interleaved),
            "concurrent" => Ok(ExecMode::Concurrent),
            other => Err(Error::invalid(format!("unknown execution mode {other:?}"))),
        }
    }
}

impl fmt::Display for ExecMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExecMode::Interleaved => "interleaved",
            ExecMode::Concurrent => "concurrent",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Blocked {
    No,
    Recv,
    Collective,
}

struct NetState {
    inboxes: Vec<VecDeque<Message>>,
    wakers: Vec<Option<Waker>>,
    blocked: Vec<Blocked>,
    blocked_count: usize,
    live: usize,
    deadlock: bool,
    stats: Vec<MessageStats>,
    coll_generation: u64,
    coll_arrived: usize,
    coll_acc: u64,
    coll_result: u64,
}

impl NetState {
    fn block(&mut self, rank: Rank, why: Blocked, waker: &Waker) -> bool {
        self.wakers[rank] = Some(waker.clone());
        if self.blocked[rank] == Blocked::No {
            self.blocked_count += 1;
        }
        self.blocked[rank] = why;
        self.check_deadlock()
    }

    fn unblock(&mut self, rank: Rank) {
        if self.blocked[rank] != Blocked::No {
            self.blocked[rank] = Blocked::No;
            self.blocked_count -= 1;
            if let Some(w) = self.wakers[rank].take() {
                w.wake();
            }
        }
    }

    fn check_deadlock(&mut self) -> bool {
        if !self.deadlock && self.live > 0 && self.blocked_count == self.live {
            self.deadlock = true;
            for w in self.wakers.iter_mut().filter_map(Option::take) {
                w.wake();
            }
        }
        self.deadlock
    }
}

struct Network {
    ranks: usize,
    mode: ExecMode,
    state: Mutex<NetState>,
}

impl Network {
    fn new(ranks: usize, mode: ExecMode) -> Self {
        Network {
            ranks,
            mode,
            state: Mutex::new(NetState {
                inboxes: vec![VecDeque::new(); ranks],
                wakers: vec![None; ranks],
                blocked: vec![Blocked::No; ranks],
                blocked_count: 0,
                live: ranks,
                deadlock: false,
                stats: vec![MessageStats::default(); ranks],
                coll_generation: 0,
                coll_arrived: 0,
                coll_acc: 0,
                coll_result: 0,
            }),
        }
    }

    fn lock(&self) -> MutexGuard<'_, NetState> {
        // a panicking rank poisons the lock; the state itself stays consistent
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn finish(&self, rank: Rank) {
        let mut st = self.lock();
        if st.blocked[rank] != Blocked::No {
            st.blocked[rank] = Blocked::No;
            st.blocked_count -= 1;
        }
        st.live -= 1;
        st.check_deadlock();
    }
}

/// A rank's handle onto the network.
pub struct RankContext {
    rank: Rank,
    net: Arc<Network>,
}

impl RankContext {
    #[inline]
    pub fn rank(&self) -> Rank {
        self.rank
    }

    #[inline]
    pub fn ranks(&self) -> usize {
        self.net.ranks
    }

    pub fn mode(&self) -> ExecMode {
        self.net.mode
    }

    pub fn stats(&self) -> MessageStats {
        self.net.lock().stats[self.rank]
    }

    /// Enqueues `payload` at `dst`. Sending to oneself or past `p − 1` fails.
    pub fn send(&mut self, dst: Rank, payload: Payload) -> Result<()> {
        if dst == self.rank || dst >= self.net.ranks {
            return Err(Error::InvalidDestination {
                src: self.rank,
                dst,
                ranks: self.net.ranks,
            });
        }
        let mut st = self.net.lock();
        st.stats[self.rank].record(&payload, true);
        st.inboxes[dst].push_back(Message {
            src: self.rank,
            payload,
        });
        if st.blocked[dst] == Blocked::Recv {
            st.unblock(dst);
        }
        Ok(())
    }

    /// Sends a control message to every other rank.
    pub fn broadcast_control(&mut self) -> Result<()> {
        let me = self.rank;
        for dst in (0..self.net.ranks).filter(|&d| d != me) {
            self.send(dst, Payload::Control)?;
        }
        Ok(())
    }

    /// Removes and returns everything currently queued, oldest first. Never
    /// blocks; in interleaved mode other ranks get a turn first.
    pub async fn drain(&mut self) -> Vec<Message> {
        if self.net.mode == ExecMode::Interleaved {
            yield_now().await;
        }
        let mut st = self.net.lock();
        let msgs: Vec<Message> = st.inboxes[self.rank].drain(..).collect();
        for m in &msgs {
            st.stats[self.rank].record(&m.payload, false);
        }
        msgs
    }

    /// Waits for the next message.
    pub async fn recv(&mut self) -> Result<Message> {
        let rank = self.rank;
        let net = &self.net;
        poll_fn(|cx| {
            let mut st = net.lock();
            if let Some(msg) = st.inboxes[rank].pop_front() {
                if st.blocked[rank] != Blocked::No {
                    st.blocked[rank] = Blocked::No;
                    st.blocked_count -= 1;
                }
                st.stats[rank].record(&msg.payload, false);
                return Poll::Ready(Ok(msg));
            }
            if st.deadlock || st.block(rank, Blocked::Recv, cx.waker()) {
                return Poll::Ready(Err(Error::Deadlock));
            }
            Poll::Pending
        })
        .await
    }

    /// Sums `value` over all ranks; every rank gets the total.
    pub async fn all_reduce_sum(&mut self, value: u64) -> Result<u64> {
        let rank = self.rank;
        let net = &self.net;
        let mut joined: Option<u64> = None;
        poll_fn(|cx| {
            let mut st = net.lock();
            match joined {
                None => {
                    joined = Some(st.coll_generation);
                    st.coll_acc += value;
                    st.coll_arrived += 1;
                    if st.coll_arrived == net.ranks {
                        st.coll_result = st.coll_acc;
                        st.coll_acc = 0;
                        st.coll_arrived = 0;
                        st.coll_generation += 1;
                        for r in 0..net.ranks {
                            if st.blocked[r] == Blocked::Collective {
                                st.unblock(r);
                            }
                        }
                        return Poll::Ready(Ok(st.coll_result));
                    }
                }
                // a round cannot complete again until this rank joins the next one
                Some(gen) if st.coll_generation > gen => {
                    return Poll::Ready(Ok(st.coll_result));
                }
                Some(_) => {}
            }
            if st.deadlock || st.block(rank, Blocked::Collective, cx.waker()) {
                return Poll::Ready(Err(Error::Deadlock));
            }
            Poll::Pending
        })
        .await
    }

    pub async fn barrier(&mut self) -> Result<()> {
        self.all_reduce_sum(0).await.map(|_| ())
    }

    /// Sum over all ranks, delivered to rank 0 only.
    pub async fn reduce_sum(&mut self, value: u64) -> Result<Option<u64>> {
        let total = self.all_reduce_sum(value).await?;
        Ok((self.rank == 0).then_some(total))
    }

    /// Rank 0's `value`, delivered to every rank.
    pub async fn broadcast(&mut self, value: u64) -> Result<u64> {
        let mine = if self.rank == 0 { value } else { 0 };
        self.all_reduce_sum(mine).await
    }
}

fn yield_now() -> impl Future<Output = ()> {
    let mut yielded = false;
    poll_fn(move |cx| {
        if yielded {
            Poll::Ready(())
        } else {
            yielded = true;
            cx.waker().wake_by_ref();
            Poll::Pending
        }
    })
}

struct ThreadWaker(Thread);

impl Wake for ThreadWaker {
    fn wake(self: Arc<Self>) {
        self.0.unpark();
    }

    fn wake_by_ref(self: &Arc<Self>) {
        self.0.unpark();
    }
}

fn block_on<F: Future>(fut: F) -> F::Output {
    let mut fut = pin!(fut);
    let waker = Waker::from(Arc::new(ThreadWaker(thread::current())));
    let mut cx = Context::from_waker(&waker);
    loop {
        match fut.as_mut().poll(&mut cx) {
            Poll::Ready(v) => return v,
            Poll::Pending => thread::park(),
        }
    }
}

/// Per-rank results and traffic counters of one run.
#[derive(Debug)]
pub struct RunOutput<R> {
    pub results: Vec<R>,
    pub stats: Vec<MessageStats>,
}

/// Runs `program` once per rank to completion.
///
/// If some rank fails, the first non-deadlock error (by rank) is returned,
/// since other ranks typically deadlock waiting on the failed one.
pub fn run_ranks<F, Fut, R>(ranks: usize, mode: ExecMode, program: F) -> Result<RunOutput<R>>
where
    F: Fn(RankContext) -> Fut + Sync,
    Fut: Future<Output = Result<R>> + Send,
    R: Send,
{
    if ranks == 0 {
        return Err(Error::invalid("rank count must be at least 1"));
    }
    let net = Arc::new(Network::new(ranks, mode));
    let context = |rank| RankContext {
        rank,
        net: Arc::clone(&net),
    };

    let outcomes: Vec<Result<R>> = match mode {
        ExecMode::Interleaved => {
            let mut running: Vec<Option<Pin<Box<Fut>>>> =
                (0..ranks).map(|r| Some(Box::pin(program(context(r))))).collect();
            let mut done: Vec<Option<Result<R>>> = (0..ranks).map(|_| None).collect();
            let mut cx = Context::from_waker(Waker::noop());
            let mut remaining = ranks;
            while remaining > 0 {
                for r in 0..ranks {
                    let Some(fut) = running[r].as_mut() else {
                        continue;
                    };
                    if let Poll::Ready(out) = fut.as_mut().poll(&mut cx) {
                        running[r] = None;
                        done[r] = Some(out);
                        net.finish(r);
                        remaining -= 1;
                    }
                }
            }
            done.into_iter().map(|o| o.expect("every rank finished")).collect()
        }
        ExecMode::Concurrent => thread::scope(|scope| {
            let handles: Vec<_> = (0..ranks)
                .map(|r| {
                    let ctx = context(r);
                    let program = &program;
                    let net = Arc::clone(&net);
                    scope.spawn(move || {
                        let out = block_on(program(ctx));
                        net.finish(r);
                        out
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
                .collect()
        }),
    };

    let stats = net.lock().stats.clone();
    let mut results = Vec::with_capacity(ranks);
    let mut first_err: Option<Error> = None;
    for out in outcomes {
        match out {
            Ok(r) => results.push(r),
            Err(e) => {
                let replace = match &first_err {
                    None => true,
                    Some(Error::Deadlock) => !matches!(e, Error::Deadlock),
                    Some(_) => false,
                };
                if replace {
                    first_err = Some(e);
                }
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(RunOutput { results, stats }),
    }
}
