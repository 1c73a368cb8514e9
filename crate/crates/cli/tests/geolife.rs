use std::collections::HashSet;
use std::fs;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use optg::geolife::{ingest, parse_plt, segment_trajectories, to_plt, GpsPoint, LabelInterval, MIN_POINTS};
use proptest::prelude::*;

fn base() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2008, 6, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap()
}

fn arb_points(max: usize) -> impl Strategy<Value = Vec<GpsPoint>> {
    prop::collection::vec((-90.0f64..90.0, -180.0f64..180.0, 0i64..86_400 * 30), 0..max).prop_map(|raw| {
        raw.into_iter()
            .map(|(lat, lon, s)| GpsPoint {
                latitude: lat,
                longitude: lon,
                time: base() + Duration::seconds(s),
            })
            .collect()
    })
}

const MODES: [&str; 7] = ["walk", "bike", "bus", "car", "taxi", "train", "subway"];

/// Strictly increasing point times plus up to 11 label intervals
/// (possibly overlapping) drawn over the same range.
fn arb_user() -> impl Strategy<Value = (Vec<GpsPoint>, Vec<LabelInterval>)> {
    let times = prop::collection::btree_set(0i64..5_000, 0..400);
    let labels = prop::collection::vec((0i64..5_000, 0i64..600, 0usize..MODES.len()), 0..12);
    (times, labels).prop_map(|(times, labels)| {
        let points = times
            .into_iter()
            .map(|s| GpsPoint {
                latitude: 39.9,
                longitude: 116.3,
                time: base() + Duration::seconds(s),
            })
            .collect();
        let labels = labels
            .into_iter()
            .map(|(start, len, m)| LabelInterval {
                start: base() + Duration::seconds(start),
                end: base() + Duration::seconds(start + len),
                mode: MODES[m].to_string(),
            })
            .collect();
        (points, labels)
    })
}

proptest! {
    #[test]
    fn plt_round_trip(points in arb_points(50)) {
        let parsed = parse_plt(&to_plt(&points)).unwrap();
        prop_assert_eq!(parsed, points);
    }

    #[test]
    fn segmentation_assigns_each_point_at_most_once((points, labels) in arb_user()) {
        let (trajectories, stats) = segment_trajectories("u", &points, &labels);
        let mut seen = HashSet::new();
        for t in &trajectories {
            prop_assert!(t.points.len() >= MIN_POINTS);
            prop_assert!(t.points.windows(2).all(|w| w[0].time < w[1].time));
            prop_assert!(labels.iter().any(|iv| t.validate(Some(iv))));
            for p in &t.points {
                prop_assert!(seen.insert(p.time), "point at {} assigned twice", p.time);
            }
        }
        let labeled = points
            .iter()
            .filter(|p| labels.iter().any(|iv| iv.contains(p.time)))
            .count();
        prop_assert_eq!(labeled + stats.unlabeled_points, points.len());
        prop_assert!(seen.len() <= labeled);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn report_counts_sum_to_total(users in prop::collection::vec(arb_user(), 1..4)) {
        let dir = tempfile::tempdir().unwrap();
        for (u, (points, labels)) in users.iter().enumerate() {
            let udir = dir.path().join(format!("Data/{u:03}/Trajectory"));
            fs::create_dir_all(&udir).unwrap();
            // Split across two files to exercise concatenation.
            let (a, b) = points.split_at(points.len() / 2);
            fs::write(udir.join("a.plt"), to_plt(b)).unwrap();
            fs::write(udir.join("b.plt"), to_plt(a)).unwrap();
            let mut text = String::from("Start Time\tEnd Time\tTransportation Mode\n");
            for iv in labels {
                text.push_str(&format!(
                    "{}\t{}\t{}\n",
                    iv.start.format("%Y/%m/%d %H:%M:%S"),
                    iv.end.format("%Y/%m/%d %H:%M:%S"),
                    iv.mode
                ));
            }
            fs::write(dir.path().join(format!("Data/{u:03}/labels.txt")), text).unwrap();
        }
        let got = ingest(dir.path()).unwrap();
        let r = &got.report;
        prop_assert_eq!(r.users_total, users.len());
        prop_assert_eq!(r.users_labeled, users.len());
        prop_assert_eq!(r.trajectories.values().sum::<usize>(), r.total);
        prop_assert_eq!(r.total, got.trajectories.len());

        let expected: usize = users
            .iter()
            .enumerate()
            .map(|(u, (p, l))| segment_trajectories(&format!("{u:03}"), p, l).0.len())
            .sum();
        prop_assert_eq!(r.total, expected);
        let ids: HashSet<_> = got.trajectories.iter().map(|t| t.id.as_str()).collect();
        prop_assert_eq!(ids.len(), r.total);
    }
}
