use std::io::Write;
use std::path::Path;

use serde::Serialize;

use roisim::analog_sensor::ppm;
use roisim::cost_model::{
    analytical_costs, energy, load_boxes, reduction_factors, stage_fractions, CostInputs,
    CostReport, CostRow, EnergyReport, Reductions, StageFractions,
};
use roisim::roi_protocol::{oracle_detector, run_baseline, run_two_stage, LedgerTotals, RoiBox};
use roisim::validate::{observed_costs, run_validation};
use roisim::workload::{load_annotations, run_sweep, synth_scene, tile_boxes, SweepSpec};
use roisim::SimError;

use super::{Command, CostArgs, Format, SimulateArgs, SweepArgs, ValidateArgs};

/// Failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        Self {
            code: if e.is_config() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e).into()
    }
}

type CliResult = Result<(), CliError>;

pub fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Cost(a) => cmd_cost(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Validate(a) => cmd_validate(&a),
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

/// `JxWxH`, or `0` for no boxes.
fn parse_boxes(spec: &str) -> Result<(usize, u32, u32), CliError> {
    let bad = || CliError::config(format!("--boxes expects JxWxH or 0, got '{spec}'"));
    if spec.trim() == "0" {
        return Ok((0, 0, 0));
    }
    let parts: Vec<&str> = spec.split('x').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let j = parts[0].parse().map_err(|_| bad())?;
    let w = parts[1].parse().map_err(|_| bad())?;
    let h = parts[2].parse().map_err(|_| bad())?;
    Ok((j, w, h))
}

#[derive(Serialize)]
struct FrameTraces {
    frame_id: String,
    width: u32,
    height: u32,
    two_stage: roisim::roi_protocol::SessionTrace,
    baseline: roisim::roi_protocol::SessionTrace,
    formula: CostReport,
    formula_agrees: bool,
}

#[derive(Serialize)]
struct SimulateDoc {
    frames: Vec<FrameTraces>,
    totals: LedgerTotals,
    baseline_totals: LedgerTotals,
}

#[derive(Serialize)]
struct MessageCsvRow<'a> {
    frame_id: &'a str,
    session: &'a str,
    direction: roisim::roi_protocol::Direction,
    kind: roisim::roi_protocol::MessageKind,
    bytes: u64,
    conversions: u64,
    boxes: u64,
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult {
    let mut frames = Vec::new();
    if a.synthetic {
        let (n, m) = a.sensor.dims()?;
        // geometry first so a bad k is reported before generating pixels
        a.sensor.config(n, m, a.seed)?;
        let (j, w, h) = parse_boxes(&a.boxes)?;
        let (array, frame) = synth_scene(n, m, j, w, h, a.seed)?;
        if let Some(path) = &a.annotations_out {
            std::fs::write(path, format!("{}\n", frame.to_json_line()))?;
        }
        frames.push((frame.frame_id, array, frame.boxes));
    } else if !a.inputs.is_empty() {
        let annotations = match &a.annotations {
            Some(p) => load_annotations(p)?.frames,
            None => Vec::new(),
        };
        for path in &a.inputs {
            let array = ppm::read_ppm(path, a.sensor.vdd)?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            if let (Some(w), Some(h)) = (a.sensor.width, a.sensor.height) {
                if (w, h) != (array.width(), array.height()) {
                    return Err(CliError::config(format!(
                        "{} is {}x{}, flags say {w}x{h}",
                        path.display(),
                        array.width(),
                        array.height()
                    )));
                }
            }
            let boxes = annotations
                .iter()
                .find(|f| f.frame_id == id)
                .map(|f| f.boxes.clone())
                .unwrap_or_default();
            frames.push((id, array, boxes));
        }
    } else {
        return Err(CliError::config(
            "no frame source: pass --synthetic or --input <file.ppm>",
        ));
    }

    let mut doc = SimulateDoc {
        frames: Vec::new(),
        totals: LedgerTotals::default(),
        baseline_totals: LedgerTotals::default(),
    };
    for (id, array, boxes) in frames {
        let cfg = a.sensor.config(array.width(), array.height(), a.seed)?;
        let two = run_two_stage(&array, &cfg, &oracle_detector(&boxes, cfg.k))?;
        let base = run_baseline(&array, &cfg)?;
        let formula = analytical_costs(&CostInputs::from_config(&cfg, two.roi_boxes.clone()))?;
        let formula_agrees = formula == observed_costs(&two, &base);
        doc.totals.merge(two.ledger.totals());
        doc.baseline_totals.merge(base.ledger.totals());
        eprintln!(
            "frame {id}: two-stage {} B / {} conversions, baseline {} B / {} conversions, formula {}",
            two.ledger.totals().bytes_s_to_p + two.ledger.totals().bytes_p_to_s,
            two.ledger.totals().total_conversions,
            base.ledger.totals().bytes_s_to_p,
            base.ledger.totals().total_conversions,
            if formula_agrees { "agrees" } else { "DIVERGES" }
        );
        doc.frames.push(FrameTraces {
            frame_id: id,
            width: cfg.n,
            height: cfg.m,
            two_stage: two,
            baseline: base,
            formula,
            formula_agrees,
        });
    }

    let bytes = match a.out.format {
        Format::Json => to_json(&doc),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for f in &doc.frames {
                for (session, trace) in [("two_stage", &f.two_stage), ("baseline", &f.baseline)] {
                    for msg in trace.ledger.messages() {
                        w.serialize(MessageCsvRow {
                            frame_id: &f.frame_id,
                            session,
                            direction: msg.direction,
                            kind: msg.kind,
                            bytes: msg.bytes,
                            conversions: msg.conversions,
                            boxes: msg.boxes,
                        })
                        .map_err(|e| CliError::from(std::io::Error::other(e)))?;
                    }
                }
            }
            w.into_inner().map_err(|e| CliError::from(e.into_error()))?
        }
    };
    write_output(a.out.output.as_deref(), &bytes)
}

#[derive(Serialize)]
struct CostDoc {
    inputs: CostInputs,
    cost: CostReport,
    energy: EnergyReport,
    reductions: Option<Reductions>,
    data_reduction: Option<f64>,
    stage_fractions: Option<StageFractions>,
}

fn cmd_cost(a: &CostArgs) -> CliResult {
    let (n, m) = a.sensor.dims()?;
    let cfg = a.sensor.config(n, m, 0)?;
    let params = a.energy.params()?;
    let mut rois: Vec<RoiBox> = match (&a.load_s, &a.boxes) {
        (Some(s), _) => load_boxes(n, m, *s)?,
        (None, Some(b)) => {
            let (j, w, h) = parse_boxes(b)?;
            tile_boxes(n, m, w, h, j)?
        }
        (None, None) => Vec::new(),
    };
    if a.full_frame_box {
        rois.push(RoiBox::new(0, 0, n, m));
    }
    let mut inputs = CostInputs::from_config(&cfg, rois);
    inputs.memory_mode = a.memory();
    inputs.dedup_union = a.dedup_union;

    let cost = analytical_costs(&inputs)?;
    let e = energy(&cost, &params);
    let reductions = reduction_factors(&cost).ok();
    let fractions = stage_fractions(&cost).ok();
    eprintln!(
        "d_new={} B ({:.1}x less than baseline), c_new={}, e_total={:.4} mJ ({:.2}x)",
        cost.d_new,
        reductions.map(|r| r.data.value()).unwrap_or(f64::NAN),
        cost.c_new,
        e.e_total * 1e3,
        e.reduction_factor
    );
    let bytes = match a.out.format {
        Format::Json => to_json(&CostDoc {
            inputs,
            cost,
            energy: e,
            data_reduction: reductions.map(|r| r.data.value()),
            reductions,
            stage_fractions: fractions,
        }),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(CostRow::new(&cost, &e))
                .map_err(|e| CliError::from(std::io::Error::other(e)))?;
            w.into_inner().map_err(|e| CliError::from(e.into_error()))?
        }
    };
    write_output(a.out.output.as_deref(), &bytes)
}

fn cmd_sweep(a: &SweepArgs) -> CliResult {
    let spec = SweepSpec::load(&a.spec)?;
    let frames = match &a.annotations {
        Some(p) => {
            let set = load_annotations(p)?;
            for e in &set.errors {
                eprintln!("warning: {}: line {}: {}", p.display(), e.line, e.message);
            }
            set.frames
        }
        None => Vec::new(),
    };
    let report = run_sweep(&spec, &frames, &a.energy.params()?);
    for row in report.rows().filter(|r| !r.error.is_empty()) {
        eprintln!("warning: {}: {}", row.config, row.error);
    }
    eprintln!("{} configurations", report.configs.len());

    let bytes = match a.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            buf
        }
    };
    write_output(a.output.as_deref(), &bytes)?;
    if let Some(p) = &a.long_output {
        let mut buf = Vec::new();
        report.write_long_csv(&mut buf)?;
        std::fs::write(p, buf)?;
    }
    Ok(())
}

fn cmd_validate(a: &ValidateArgs) -> CliResult {
    if a.trials == 0 {
        eprintln!("warning: 0 trials requested, nothing checked");
        return Ok(());
    }
    let bump = |r: &mut CostReport| r.c2_sp += 1;
    let tamper: Option<&dyn Fn(&mut CostReport)> = a.inject_off_by_one.then_some(&bump as _);
    match run_validation(a.trials, a.seed, tamper)? {
        Ok(n) => {
            println!("validate: {n} trials, ledger matches formulas on every field");
            Ok(())
        }
        Err(d) => {
            let fields: Vec<String> = d
                .fields
                .iter()
                .map(|(name, want, got)| format!("{name} (formula {want}, ledger {got})"))
                .collect();
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&d).expect("serializable")
            );
            Err(CliError {
                code: 3,
                message: format!(
                    "model divergence at trial {}: {}",
                    d.trial.index,
                    fields.join(", ")
                ),
            })
        }
    }
}
