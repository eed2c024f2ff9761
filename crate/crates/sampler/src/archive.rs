use std::fmt::Write as _;

use psdpp_hypgeom::{Point, C64};

use crate::{Configuration, Generator, Result, SamplerError, TruncationMeta};

pub(crate) fn write(c: &Configuration) -> String {
    let mut s = format!(
        "# dpp d={} generator={} seed={} R={:?} N={}\n",
        c.d, c.generator, c.seed, c.window_radius, c.meta.degree
    );
    let _ = writeln!(
        s,
        "# meta margin={:e} accepted={} rejected={}",
        c.meta.tail_margin, c.meta.accepted, c.meta.rejected
    );
    for p in &c.points {
        let row: Vec<String> = p
            .coords()
            .iter()
            .flat_map(|z| [format!("{:.16e}", z.re), format!("{:.16e}", z.im)])
            .collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn fields<'a>(line: &'a str, prefix: &str) -> Result<Vec<(&'a str, &'a str)>> {
    let rest = line
        .strip_prefix(prefix)
        .ok_or_else(|| SamplerError::Parse(format!("expected `{prefix}`")))?;
    rest.split_whitespace()
        .map(|f| f.split_once('=').ok_or_else(|| SamplerError::Parse(format!("bad field {f}"))))
        .collect()
}

fn num<T: std::str::FromStr>(v: &str, key: &str) -> Result<T> {
    v.parse().map_err(|_| SamplerError::Parse(format!("bad value for {key}: {v}")))
}

pub(crate) fn read(text: &str) -> Result<Configuration> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    let header = lines.next().ok_or_else(|| SamplerError::Parse("empty archive".into()))?;
    let (mut d, mut gen, mut seed, mut r, mut n) = (None, None, None, None, None);
    for (k, v) in fields(header, "# dpp")? {
        match k {
            "d" => d = Some(num::<usize>(v, k)?),
            "generator" => gen = Some(v.parse::<Generator>().map_err(|e| SamplerError::Parse(e.to_string()))?),
            "seed" => seed = Some(num::<u64>(v, k)?),
            "R" => r = Some(num::<f64>(v, k)?),
            "N" => n = Some(num::<usize>(v, k)?),
            _ => return Err(SamplerError::Parse(format!("unknown header key {k}"))),
        }
    }
    let (Some(d), Some(generator), Some(seed), Some(window_radius), Some(degree)) = (d, gen, seed, r, n) else {
        return Err(SamplerError::Parse("incomplete header".into()));
    };
    let mut meta = TruncationMeta {
        degree,
        ..Default::default()
    };
    if let Some(line) = lines.peek().filter(|l| l.starts_with("# meta")) {
        for (k, v) in fields(line, "# meta")? {
            match k {
                "margin" => meta.tail_margin = num(v, k)?,
                "accepted" => meta.accepted = num(v, k)?,
                "rejected" => meta.rejected = num(v, k)?,
                _ => return Err(SamplerError::Parse(format!("unknown meta key {k}"))),
            }
        }
        lines.next();
    }
    let mut points = Vec::new();
    for line in lines {
        let vals = line
            .split(',')
            .map(|v| num::<f64>(v.trim(), "coordinate"))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 2 * d {
            return Err(SamplerError::Parse(format!("expected {} numbers per row, found {}", 2 * d, vals.len())));
        }
        let coords = vals.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
        points.push(Point::new(coords)?);
    }
    Ok(Configuration {
        points,
        window_radius,
        seed,
        generator,
        d,
        meta,
    })
}
