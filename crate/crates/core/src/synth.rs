//! A small synthetic fixed-form corpus: 9 programs, 22 paragraphs.
//!
//! Programs are written in a compact line notation and rendered to fixed
//! form on demand:
//!
//! * `A text` - Area A (column 8)
//! * `B text` - Area B (column 12); extra leading spaces are kept
//! * `*text` - comment line, `-text` - continuation line, `Dtext` - debug line
//! * an empty entry - blank line

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub struct SynthProgram {
    pub id: &'static str,
    lines: &'static [&'static str],
}

impl SynthProgram {
    pub fn text(&self) -> String {
        let mut out = String::new();
        for l in self.lines {
            let rendered = match l.split_at(l.len().min(1)) {
                ("", _) => String::new(),
                ("A", rest) => format!("       {}", &rest[1..]),
                ("B", rest) => format!("           {}", &rest[1..]),
                (ind @ ("*" | "-" | "D"), rest) => format!("      {ind}{rest}"),
                _ => panic!("bad synth line `{l}`"),
            };
            out.push_str(&rendered);
            out.push('\n');
        }
        out
    }
}

const CUSTINQ: &[&str] = &[
    "A IDENTIFICATION DIVISION.",
    "A PROGRAM-ID. CUSTINQ.",
    "A DATA DIVISION.",
    "A WORKING-STORAGE SECTION.",
    "A 01 WS-CUSTOMER-ID      PIC 9(6) VALUE ZERO.",
    "A 01 WS-CUSTOMER-NAME    PIC X(30) VALUE SPACES.",
    "A 01 WS-FOUND-FLAG       PIC X VALUE 'N'.",
    "A     88 CUSTOMER-FOUND  VALUE 'Y'.",
    "A 01 WS-RETRY-COUNT      PIC 9(2) VALUE 0.",
    "A PROCEDURE DIVISION.",
    "A MAIN-PARA.",
    "*    Entry point: look the customer up and show it.",
    "B MOVE 1024 TO WS-CUSTOMER-ID",
    "B PERFORM LOOKUP-CUSTOMER",
    "B PERFORM SHOW-RESULT",
    "B STOP RUN.",
    "",
    "A LOOKUP-CUSTOMER.",
    "B IF WS-CUSTOMER-ID > 1000",
    "B     MOVE 'Y' TO WS-FOUND-FLAG",
    "B     MOVE 'ACME INDUSTRIAL SUPPLY' TO WS-CUSTOMER-NAME",
    "B ELSE",
    "B     ADD 1 TO WS-RETRY-COUNT",
    "B END-IF",
    "B DISPLAY 'LOOKUP DONE'.",
    "",
    "A SHOW-RESULT.",
    "B IF CUSTOMER-FOUND",
    "B     DISPLAY 'CUSTOMER: ' WS-CUSTOMER-NAME",
    "B END-IF.",
];

const ACCTUPD: &[&str] = &[
    "A IDENTIFICATION DIVISION.",
    "A PROGRAM-ID. ACCTUPD.",
    "A DATA DIVISION.",
    "A WORKING-STORAGE SECTION.",
    "A 01 WS-BALANCE          PIC S9(7)V99 VALUE 0.",
    "A 01 WS-AMOUNT           PIC S9(7)V99 VALUE 125.50.",
    "A 01 WS-TXN-TYPE         PIC X VALUE 'D'.",
    "A 01 FILLER              PIC X(10) VALUE 'ACCTUPD'.",
    "A PROCEDURE DIVISION.",
    "A APPLY-TRANSACTION.",
    "B EVALUATE WS-TXN-TYPE",
    "B     WHEN 'D'",
    "B         ADD WS-AMOUNT TO WS-BALANCE",
    "B     WHEN 'W'",
    "B         SUBTRACT WS-AMOUNT FROM WS-BALANCE",
    "B     WHEN OTHER",
    "B         DISPLAY 'UNKNOWN TRANSACTION ' WS-TXN-TYPE",
    "B END-EVALUATE",
    "B PERFORM REPORT-BALANCE.",
    "",
    "A REPORT-BALANCE.",
    "*    The balance may be negative after a withdrawal.",
    "B DISPLAY 'BALANCE ' WS-BALANCE",
    "B STOP RUN.",
];

const ORDPROC: &[&str] = &[
    "A IDENTIFICATION DIVISION.",
    "A PROGRAM-ID. ORDPROC.",
    "A DATA DIVISION.",
    "A WORKING-STORAGE SECTION.",
    "A 01 WS-ORDER-TABLE.",
    "A    05 WS-ORDER-QTY      PIC 9(3) OCCURS 5 TIMES.",
    "A 01 WS-IDX              PIC 9(2) VALUE 1.",
    "A 01 WS-TOTAL-QTY        PIC 9(5) VALUE 0.",
    "A 01 WS-MESSAGE          PIC X(60).",
    "A PROCEDURE DIVISION.",
    "A INIT-ORDERS.",
    "B PERFORM VARYING WS-IDX FROM 1 BY 1 UNTIL WS-IDX > 5",
    "B     MOVE WS-IDX TO WS-ORDER-QTY (WS-IDX)",
    "B END-PERFORM.",
    "",
    "A SUM-ORDERS.",
    "B MOVE 0 TO WS-TOTAL-QTY",
    "B PERFORM VARYING WS-IDX FROM 1 BY 1 UNTIL WS-IDX > 5",
    "B     ADD WS-ORDER-QTY (WS-IDX) TO WS-TOTAL-QTY",
    "B END-PERFORM",
    "B DISPLAY 'TOTAL ' WS-TOTAL-QTY.",
    "",
    "A FINISH-ORDERS.",
    "B MOVE 'ORDER PROCESSING COMPLETED FOR ALL OPEN ORDERS IN THE D",
    "-    'AILY BATCH' TO WS-MESSAGE",
    "B DISPLAY WS-MESSAGE",
    "B STOP RUN.",
];

const INVRPT: &[&str] = &[
    "A IDENTIFICATION DIVISION.",
    "A PROGRAM-ID. INVRPT.",
    "A DATA DIVISION.",
    "A WORKING-STORAGE SECTION.",
    "A 01 WS-ITEM-COUNT       PIC 9(4) VALUE 12.",
    "A 01 WS-REORDER-LEVEL    PIC 9(4) VALUE 20.",
    "A 01 WS-STATUS           PIC X(8).",
    "A PROCEDURE DIVISION.",
    "A CHECK-STOCK.",
    "B IF WS-ITEM-COUNT < WS-REORDER-LEVEL",
    "B     MOVE 'REORDER' TO WS-STATUS",
    "B ELSE",
    "B     MOVE 'OK' TO WS-STATUS",
    "B END-IF",
    "B DISPLAY 'STOCK ' WS-STATUS.",
    "",
    "*    Summary line for the nightly report.",
    "A PRINT-SUMMARY.",
    "B DISPLAY 'ITEMS ', WS-ITEM-COUNT,",
    "B     ' LEVEL ', WS-REORDER-LEVEL",
    "B STOP RUN.",
];

const PAYCALC: &[&str] = &[
    "A IDENTIFICATION DIVISION.",
    "A PROGRAM-ID. PAYCALC.",
    "A DATA DIVISION.",
    "A WORKING-STORAGE SECTION.",
    "A 01 WS-HOURS            PIC 9(3) VALUE 45.",
    "A 01 WS-RATE             PIC 9(3)V99 VALUE 20.00.",
    "A 01 WS-GROSS-PAY        PIC 9(6)V99 VALUE 0.",
    "A 01 WS-OVERTIME         PIC 9(3) VALUE 0.",
    "A PROCEDURE DIVISION.",
    "A COMPUTE-OVERTIME.",
    "B IF WS-HOURS > 40",
    "B     COMPUTE WS-OVERTIME = WS-HOURS - 40",
    "B END-IF",
    "B PERFORM COMPUTE-GROSS.",
    "",
    "A COMPUTE-GROSS.",
    "B COMPUTE WS-GROSS-PAY = WS-HOURS * WS-RATE",
    "B     + WS-OVERTIME * WS-RATE / 2",
    "B   ON SIZE ERROR",
    "B     DISPLAY 'PAY OVERFLOW'",
    "B END-COMPUTE.",
    "",
    "A SHOW-PAY.",
    "*    Gross pay only; deductions live elsewhere.",
    "D    DISPLAY 'DEBUG HOURS ' WS-HOURS",
    "B DISPLAY 'GROSS ' WS-GROSS-PAY",
    "B STOP RUN.",
];

const CLMCHK: &[&str] = &[
    "A IDENTIFICATION DIVISION.",
    "A PROGRAM-ID. CLMCHK.",
    "A DATA DIVISION.",
    "A WORKING-STORAGE SECTION.",
    "A 01 WS-CLAIM-AMT        PIC 9(7) VALUE 5400.",
    "A 01 WS-LIMIT            PIC 9(7) VALUE 5000.",
    "A 01 WS-DECISION         PIC X(10).",
    "A PROCEDURE DIVISION.",
    "A VALIDATE-CLAIM.",
    "B EVALUATE TRUE",
    "B     WHEN WS-CLAIM-AMT > WS-LIMIT",
    "B         MOVE 'REFER' TO WS-DECISION",
    "B     WHEN WS-CLAIM-AMT = 0",
    "B         MOVE 'REJECT' TO WS-DECISION",
    "B     WHEN OTHER",
    "B         MOVE 'APPROVE' TO WS-DECISION",
    "B END-EVALUATE.",
    "",
    "A REPORT-CLAIM.",
    "B DISPLAY 'CLAIM ' WS-CLAIM-AMT ' ' WS-DECISION",
    "B STOP RUN.",
];

const POLREN: &[&str] = &[
    "A IDENTIFICATION DIVISION.",
    "A PROGRAM-ID. POLREN.",
    "A DATA DIVISION.",
    "A WORKING-STORAGE SECTION.",
    "A 01 WS-POLICY-NO        PIC X(8) VALUE 'P0001234'.",
    "A 01 WS-YEARS-HELD       PIC 9(2) VALUE 7.",
    "A 01 WS-DISCOUNT         PIC 9(2) VALUE 0.",
    "A 01 WS-PREMIUM          PIC 9(5)V99 VALUE 980.00.",
    "A PROCEDURE DIVISION.",
    "A RENEW-POLICY.",
    "B PERFORM SET-DISCOUNT",
    "B PERFORM APPLY-DISCOUNT",
    "B DISPLAY 'RENEWED ' WS-POLICY-NO",
    "B STOP RUN.",
    "",
    "A SET-DISCOUNT.",
    "B IF WS-YEARS-HELD > 5",
    "B     IF WS-YEARS-HELD > 10",
    "B         MOVE 15 TO WS-DISCOUNT",
    "B     ELSE",
    "B         MOVE 10 TO WS-DISCOUNT",
    "B     END-IF",
    "B END-IF.",
    "",
    "A APPLY-DISCOUNT.",
    "*    Premium is reduced by the discount percentage.",
    "B COMPUTE WS-PREMIUM =",
    "B     WS-PREMIUM - WS-PREMIUM * WS-DISCOUNT / 100.",
];

const RISKSCR: &[&str] = &[
    "A IDENTIFICATION DIVISION.",
    "A PROGRAM-ID. RISKSCR.",
    "A DATA DIVISION.",
    "A WORKING-STORAGE SECTION.",
    "A 01 WS-SCORE            PIC 9(3) VALUE 0.",
    "A 01 WS-FACTOR           PIC 9 VALUE 3.",
    "A 01 WS-COUNTER          PIC 9(2) VALUE 0.",
    "A 01 WS-BAND             PIC X(6).",
    "A PROCEDURE DIVISION.",
    "A SCORE-RISK.",
    "B PERFORM 4 TIMES",
    "B     ADD WS-FACTOR TO WS-SCORE",
    "B     ADD 1 TO WS-COUNTER",
    "B END-PERFORM",
    "B DISPLAY 'SCORE ' WS-SCORE.",
    "",
    "A BAND-RISK.",
    "B IF WS-SCORE >= 10 MOVE 'HIGH' TO WS-BAND END-IF",
    "B IF WS-SCORE < 10 MOVE 'LOW' TO WS-BAND END-IF",
    "B DISPLAY 'BAND ' WS-BAND",
    "B STOP RUN.",
];

const LOGWRT: &[&str] = &[
    "A IDENTIFICATION DIVISION.",
    "A PROGRAM-ID. LOGWRT.",
    "A DATA DIVISION.",
    "A WORKING-STORAGE SECTION.",
    "A 01 WS-LOG-LINE         PIC X(80).",
    "A 01 WS-SEVERITY         PIC 9 VALUE 2.",
    "A 01 WS-HOST-VAR         PIC X(10) VALUE 'BATCH01'.",
    "A PROCEDURE DIVISION.",
    "A WRITE-LOG.",
    "B STRING 'SEVERITY=' DELIMITED BY SIZE",
    "B        WS-SEVERITY DELIMITED BY SIZE",
    "B        INTO WS-LOG-LINE",
    "B END-STRING",
    "B EXEC SQL",
    "B     INSERT INTO AUDIT_LOG VALUES (:WS-HOST-VAR)",
    "B END-EXEC",
    "B DISPLAY WS-LOG-LINE.",
    "",
    "A CLOSE-LOG.",
    "*    Nothing to flush; the log is written line by line.",
    "B move spaces to ws-log-line",
    "B DISPLAY 'LOG CLOSED' WS-LOG-LINE",
    "B STOP RUN.",
];

pub const SYNTH_PROGRAMS: [SynthProgram; 9] = [
    SynthProgram { id: "ACCTUPD", lines: ACCTUPD },
    SynthProgram { id: "CLMCHK", lines: CLMCHK },
    SynthProgram { id: "CUSTINQ", lines: CUSTINQ },
    SynthProgram { id: "INVRPT", lines: INVRPT },
    SynthProgram { id: "LOGWRT", lines: LOGWRT },
    SynthProgram { id: "ORDPROC", lines: ORDPROC },
    SynthProgram { id: "PAYCALC", lines: PAYCALC },
    SynthProgram { id: "POLREN", lines: POLREN },
    SynthProgram { id: "RISKSCR", lines: RISKSCR },
];

/// Write the corpus as `<ID>.cbl` files under `dir`; returns the paths in
/// file-name order.
pub fn write_synth_corpus(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for p in &SYNTH_PROGRAMS {
        let path = dir.join(format!("{}.cbl", p.id));
        fs::write(&path, p.text()).map_err(|e| Error::io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{detect_form, extract_structure, CobolUnit, SourceForm, UnitKind};

    #[test]
    fn shape() {
        let mut paragraphs = 0;
        for p in &SYNTH_PROGRAMS {
            let text = p.text();
            assert!(text.lines().all(|l| l.chars().count() <= 72), "{}", p.id);
            assert_eq!(detect_form(&text), SourceForm::Fixed, "{}", p.id);
            let unit = CobolUnit::parse(&text, SourceForm::Fixed, UnitKind::Program).unwrap();
            paragraphs += extract_structure(&unit).unwrap().paragraphs().len();
        }
        assert_eq!(paragraphs, 22);
    }
}
