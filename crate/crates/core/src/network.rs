//! Authorship networks and per-author rankings.
//!
//! Papers and authors are dense 0-based ids (`io` maps external ids in and
//! out). An author's ranking is an ordered list of *their own* paper ids,
//! best first, covering their set exactly — no ties, no partial lists. An
//! author may abstain entirely, which downstream code treats as "submitted
//! nothing".

use crate::error::{Error, Result};

/// Bipartite author-paper incidence with both directions materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthorshipNetwork {
    num_papers: usize,
    num_authors: usize,
    papers_by_author: Vec<Vec<usize>>,
    authors_by_paper: Vec<Vec<usize>>,
}

impl AuthorshipNetwork {
    /// Build from per-author paper sets. Every paper in `0..num_papers` must
    /// be owned by at least one author; lists may be unsorted but not contain
    /// duplicates.
    pub fn from_ownership(num_papers: usize, papers_by_author: Vec<Vec<usize>>) -> Result<Self> {
        let num_authors = papers_by_author.len();
        if num_papers == 0 || num_authors == 0 {
            return Err(Error::invalid("network needs at least one paper and one author"));
        }
        let mut papers_by_author = papers_by_author;
        let mut authors_by_paper = vec![Vec::new(); num_papers];
        for (author, papers) in papers_by_author.iter_mut().enumerate() {
            papers.sort_unstable();
            if papers.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!(
                    "author {author} lists a paper twice"
                )));
            }
            for &p in papers.iter() {
                if p >= num_papers {
                    return Err(Error::invalid(format!(
                        "author {author} lists paper {p}, but there are only {num_papers} papers"
                    )));
                }
                authors_by_paper[p].push(author);
            }
        }
        if let Some(p) = authors_by_paper.iter().position(|a| a.is_empty()) {
            return Err(Error::invalid(format!("paper {p} has no author")));
        }
        Ok(AuthorshipNetwork {
            num_papers,
            num_authors,
            papers_by_author,
            authors_by_paper,
        })
    }

    /// Build from `(paper, author)` edges.
    pub fn from_edges(
        num_papers: usize,
        num_authors: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let mut papers_by_author = vec![Vec::new(); num_authors];
        for &(p, a) in edges {
            if a >= num_authors {
                return Err(Error::invalid(format!(
                    "edge references author {a}, but there are only {num_authors} authors"
                )));
            }
            papers_by_author[a].push(p);
        }
        Self::from_ownership(num_papers, papers_by_author)
    }

    pub fn num_papers(&self) -> usize {
        self.num_papers
    }

    pub fn num_authors(&self) -> usize {
        self.num_authors
    }

    /// Papers of one author, sorted ascending.
    pub fn papers_of(&self, author: usize) -> &[usize] {
        &self.papers_by_author[author]
    }

    /// Authors of one paper, sorted ascending.
    pub fn authors_of(&self, paper: usize) -> &[usize] {
        &self.authors_by_paper[paper]
    }

    pub fn num_edges(&self) -> usize {
        self.papers_by_author.iter().map(Vec::len).sum()
    }
}

/// Per-author best-first paper lists; `None` marks an abstaining author.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthorRankings {
    by_author: Vec<Option<Vec<usize>>>,
}

impl AuthorRankings {
    /// Validate against the network: a present ranking must be a permutation
    /// of exactly that author's paper set.
    pub fn new(net: &AuthorshipNetwork, by_author: Vec<Option<Vec<usize>>>) -> Result<Self> {
        if by_author.len() != net.num_authors() {
            return Err(Error::invalid(format!(
                "got rankings for {} authors, network has {}",
                by_author.len(),
                net.num_authors()
            )));
        }
        for (author, ranking) in by_author.iter().enumerate() {
            let Some(order) = ranking else { continue };
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!(
                    "author {author} ranks a paper twice"
                )));
            }
            if sorted != net.papers_of(author) {
                return Err(Error::invalid(format!(
                    "author {author}'s ranking must cover exactly their {} papers",
                    net.papers_of(author).len()
                )));
            }
        }
        Ok(AuthorRankings { by_author })
    }

    /// Every author ranks; convenience over `new`.
    pub fn complete(net: &AuthorshipNetwork, by_author: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(net, by_author.into_iter().map(Some).collect())
    }

    pub fn num_authors(&self) -> usize {
        self.by_author.len()
    }

    /// Best-first paper ids of one author, or `None` if they abstained.
    pub fn ranking_of(&self, author: usize) -> Option<&[usize]> {
        self.by_author[author].as_deref()
    }

    /// 1-based position of `paper` in `author`'s list, `None` if the author
    /// abstained or does not own the paper.
    pub fn rank_of(&self, author: usize, paper: usize) -> Option<usize> {
        self.ranking_of(author)?
            .iter()
            .position(|&p| p == paper)
            .map(|pos| pos + 1)
    }

    pub fn num_submitted(&self) -> usize {
        self.by_author.iter().filter(|r| r.is_some()).count()
    }
}
