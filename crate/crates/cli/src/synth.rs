use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use proxemb::synth::{family_graph, generate_role_graph, GraphFamily, Shape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::failure::{CliResult, Failure};
use crate::io::{create, write_edge_list, write_labels};

fn parse_shape(s: &str) -> Result<Shape, String> {
    Shape::from_name(s).ok_or_else(|| format!("unknown shape {s:?}; expected house, fan or star"))
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Shape planted along the cycle.
    #[arg(long, value_parser = parse_shape, default_value = "house")]
    pub shape: Shape,
    #[arg(long, default_value_t = 5)]
    pub n_shapes: usize,
    #[arg(long, default_value_t = 30)]
    pub cycle_len: usize,
    /// Random extra edges as a fraction of the clean edge count.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instead of one role graph, write a two-family graph-classification
    /// dataset with this many graphs per family.
    #[arg(long, value_name = "N")]
    pub families: Option<usize>,
    /// Output prefix (`.edgelist`, `.roles`), or the dataset directory with
    /// `--families`.
    #[arg(long)]
    pub out: PathBuf,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_family_dataset(dir: &Path, per_family: usize, seed: u64) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index_path = dir.join("index.txt");
    let labels_path = dir.join("labels.txt");
    let mut index = create(&index_path)?;
    let mut labels = create(&labels_path)?;
    writeln!(labels, "graph label").map_err(|e| Failure::io(&labels_path, e))?;
    for (label, family) in [GraphFamily::Triangles, GraphFamily::Stars].into_iter().enumerate() {
        for i in 0..per_family {
            let id = format!("g{:04}", label * per_family + i);
            let file = format!("{id}.edgelist");
            write_edge_list(&family_graph(family, &mut rng), &dir.join(&file))?;
            writeln!(index, "{id} {file}").map_err(|e| Failure::io(&index_path, e))?;
            writeln!(labels, "{id} {label}").map_err(|e| Failure::io(&labels_path, e))?;
        }
    }
    index.flush().map_err(|e| Failure::io(&index_path, e))?;
    labels.flush().map_err(|e| Failure::io(&labels_path, e))?;
    println!("wrote {} graphs to {}", 2 * per_family, dir.display());
    Ok(())
}

pub fn run(args: &SynthArgs) -> CliResult<()> {
    if let Some(per_family) = args.families {
        if per_family == 0 {
            return Err(Failure::usage("--families must be at least 1"));
        }
        return write_family_dataset(&args.out, per_family, args.seed);
    }
    let rg = generate_role_graph(args.shape, args.n_shapes, args.cycle_len, args.noise, args.seed)?;
    let edges = with_suffix(&args.out, ".edgelist");
    let roles = with_suffix(&args.out, ".roles");
    write_edge_list(&rg.graph, &edges)?;
    write_labels(&rg.roles, &roles)?;
    println!(
        "wrote {} nodes, {} edges, {} roles to {} and {}",
        rg.graph.node_count(),
        rg.graph.edge_count(),
        rg.role_count(),
        edges.display(),
        roles.display()
    );
    Ok(())
}
