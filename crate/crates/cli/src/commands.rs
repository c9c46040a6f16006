use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;

use g2hyp::analysis::{compare_distributions, p_scan_with, trace_sample};
use g2hyp::chars::{AddChar, CharTable};
use g2hyp::group::{self, classify, trace_density};
use g2hyp::hyp::{self, hyp_conv, hyp_mellin_at, hyp_naive, normalizer, HypFamily, Method};
use g2hyp::moments::{
    empirical_moment, f_direct, moment_sequence_with, orthogonality_identity_check, Level, Source,
};
use g2hyp::{Error, Result};

use crate::config::{CliSource, RunConfig};
use crate::output::{append_ledger, csv_sink, header, num, print_json, write_csv_header};
use crate::{Command, FieldArgs};

/// Largest family exported by `hyp-matrix`, in rows.
const MATRIX_ROW_CAP: u64 = 1 << 22;

fn with_header(report: &impl Serialize, header: Value) -> Value {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    v["header"] = header;
    v
}

fn psi_for(level_field: &g2hyp::ff::FieldDesc, lambda: u32) -> Result<AddChar> {
    AddChar::scaled(level_field.pow_gen(lambda as i64))
}

fn level(source: &mut CliSource, f: &FieldArgs, lambda: u32) -> Result<Level> {
    let field = source.field(f.p, f.n)?;
    let psi = psi_for(&field, lambda)?;
    source.level(field, psi)
}

fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn raw_value(level: &Level, method: Method, a_exp: u32, chi: u32) -> Result<Complex64> {
    let table = &level.table;
    let chi = table.mul_char(chi as i64);
    Ok(match method {
        Method::Naive => hyp_naive(
            table,
            level.psi,
            g2hyp::ff::FieldElem::from_exponent(a_exp),
            chi,
        )?,
        Method::Conv => hyp_conv(table, level.psi, chi)?[a_exp as usize],
        Method::Mellin => hyp_mellin_at(table, &level.gauss, chi, a_exp),
    })
}

pub fn run(config: &RunConfig, command: &Command) -> Result<()> {
    let mut source = config.source();
    match command {
        Command::FieldInfo { field } => {
            let f = source.field(field.p, field.n)?;
            print_json(&json!({
                "p": f.p(),
                "n": f.n(),
                "q": f.q(),
                "modulus": f.modulus(),
                "generator": f.generator_code(),
                "table_bytes": f.table_bytes(),
            }))
        }
        Command::Gauss { field, lambda, out } => {
            let level = level(&mut source, field, *lambda)?;
            let h = header(Some(level.field()), level.psi.scale_exponent(), config, command);
            let mut w = csv_sink(out.as_deref())?;
            writeln!(w, "# {h}")?;
            level.gauss.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Hyp {
            field,
            a,
            chi,
            method,
            lambda,
        } => {
            let level = level(&mut source, field, *lambda)?;
            let f = level.field();
            let m = f.unit_order();
            let (a, chi) = (a % m, chi % m);
            let raw = raw_value(&level, *method, a, chi)?;
            let check_method = match method {
                Method::Mellin if (m as u64) <= hyp::CONV_LEN_CAP => Some(Method::Conv),
                Method::Mellin => None,
                _ => Some(Method::Mellin),
            };
            let scale = (f.q() as f64).powf(3.5);
            let check = match check_method {
                Some(cm) => {
                    let other = raw_value(&level, cm, a, chi)?;
                    let diff = (raw - other).norm();
                    json!({
                        "method": cm,
                        "raw": complex(other),
                        "diff": diff,
                        "agree": diff <= config.cross_check_tol * scale,
                    })
                }
                None => Value::Null,
            };
            let normalized = raw * normalizer(level.gauss.a_norm());
            let collision = hyp::is_collision_character(&level.table, level.table.mul_char(chi as i64));
            print_json(&json!({
                "header": header(Some(f), level.psi.scale_exponent(), config, command),
                "a_exp": a,
                "chi": chi,
                "method": method,
                "raw": complex(raw),
                "normalized": complex(normalized),
                "abs": normalized.norm(),
                "collision": collision,
                "cross_check": check,
            }))
        }
        Command::HypMatrix {
            field,
            method,
            lambda,
            out,
        } => {
            let level = level(&mut source, field, *lambda)?;
            let f = level.field();
            let m = f.unit_order() as u64;
            if m * m > MATRIX_ROW_CAP {
                return Err(Error::FieldTooLarge {
                    q: f.q() as u64,
                    limit: (MATRIX_ROW_CAP as f64).sqrt() as u64 + 1,
                });
            }
            let families = HypFamily::compute_all(&level.table, level.psi, &level.gauss, *method)?;
            let mut h = header(Some(f), level.psi.scale_exponent(), config, command);
            h["normalization"] = json!("A^-7 Hyp with A = -g(lambda_2)");
            h["method"] = json!(method);
            let mut w = csv_sink(out.as_deref())?;
            write_csv_header(&mut w, &h, "a_exp,chi_index,re,im")?;
            for a in 0..m as u32 {
                for fam in &families {
                    let v = fam.normalized(a);
                    writeln!(w, "{a},{},{},{}", fam.chi_index(), num(v.re), num(v.im))?;
                }
            }
            w.flush()?;
            Ok(())
        }
        Command::Moment {
            field,
            a,
            order,
            lambda,
        } => {
            let level = level(&mut source, field, *lambda)?;
            let report = empirical_moment(&level, *a, *order)?;
            let h = header(Some(level.field()), level.psi.scale_exponent(), config, command);
            append_ledger(config, "moment", &h, &report)?;
            print_json(&with_header(&report, h))
        }
        Command::MomentSeq {
            p,
            a,
            order,
            n_max,
            base_degree,
        } => {
            if *n_max < 2 {
                return Err(Error::TooShort {
                    need: 2,
                    got: *n_max as usize,
                });
            }
            let seq = moment_sequence_with(*p, *base_degree, *a, *order, 1..=*n_max, &mut source)?;
            let base = source.field(*p, *base_degree)?;
            let h = header(Some(&base), 0, config, command);
            for r in &seq.reports {
                append_ledger(config, "moment", &h, r)?;
            }
            print_json(&with_header(&seq, h))
        }
        Command::FDirect { n, a } => {
            let field = source.field(3, *n)?;
            let table = CharTable::new(field.clone());
            let report = f_direct(&table, AddChar::BASE, field.pow_gen(*a as i64))?;
            let h = header(Some(&field), 0, config, command);
            append_ledger(config, "f-direct", &h, &report)?;
            print_json(&with_header(&report, h))
        }
        Command::IdentityCheck { field, a } => {
            let level = level(&mut source, field, 0)?;
            let report = orthogonality_identity_check(&level, *a)?;
            let h = header(Some(level.field()), 0, config, command);
            append_ledger(config, "identity-check", &h, &report)?;
            print_json(&with_header(&report, h))
        }
        Command::GroupMoment { group: model, order } => {
            let v = group::theoretical_moment(*model, *order)?;
            let shown = if (v - v.round()).abs() <= 1e-6 { v.round() } else { v };
            println!("{shown:.6}");
            Ok(())
        }
        Command::Satotate {
            p,
            n,
            a,
            group: model,
            bins,
            out,
        } => {
            let mut w;
            match p {
                None => {
                    let hist = trace_density(*model, *bins)?;
                    let mut h = header(None, 0, config, command);
                    h["group"] = json!(model);
                    w = csv_sink(out.as_deref())?;
                    write_csv_header(&mut w, &h, "bin_center,mass")?;
                    for (c, m) in hist.centers().iter().zip(&hist.mass) {
                        writeln!(w, "{},{}", num(*c), num(*m))?;
                    }
                }
                Some(p) => {
                    let fa = FieldArgs { p: *p, n: *n };
                    let level = level(&mut source, &fa, 0)?;
                    let (sample, max_im) = trace_sample(&level, *a % level.field().unit_order());
                    let cmp = compare_distributions(&sample, *model, *bins)?;
                    let mut h = header(Some(level.field()), 0, config, command);
                    h["group"] = json!(model);
                    h["distance"] = json!(cmp.distance);
                    h["sample_size"] = json!(cmp.sample_size);
                    h["max_abs_imag"] = json!(max_im);
                    w = csv_sink(out.as_deref())?;
                    write_csv_header(&mut w, &h, "bin_center,empirical_mass,model_mass")?;
                    let centers = cmp.empirical.centers();
                    for ((c, e), m) in centers.iter().zip(&cmp.empirical.mass).zip(&cmp.theoretical.mass) {
                        writeln!(w, "{},{},{}", num(*c), num(*e), num(*m))?;
                    }
                    if out.is_some() {
                        print_json(&json!({ "distance": cmp.distance, "sample_size": cmp.sample_size }))?;
                    }
                }
            }
            w.flush()?;
            Ok(())
        }
        Command::Scan {
            p_list,
            n_max,
            order,
            out,
        } => {
            let report = p_scan_with(p_list, *n_max, *order, &mut source)?;
            let doc = with_header(&report, header(None, 0, config, command));
            match out {
                Some(path) => {
                    let f = std::fs::File::create(path)?;
                    serde_json::to_writer_pretty(f, &doc).map_err(std::io::Error::from)?;
                    Ok(())
                }
                None => print_json(&doc),
            }
        }
        Command::Classify { field, a } => {
            let level = level(&mut source, field, 0)?;
            let report = empirical_moment(&level, *a, 4)?;
            let verdict = classify(report.value_excl, config.classify_tol);
            let h = header(Some(level.field()), 0, config, command);
            append_ledger(config, "moment", &h, &report)?;
            print_json(&json!({
                "header": h,
                "a_exp": report.a_exp,
                "m4": report.value_excl,
                "tol": config.classify_tol,
                "group": verdict,
            }))
        }
    }
}
